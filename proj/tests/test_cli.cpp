#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status;
  std::string output;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(CAPMONO_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("capmono_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto path = dir / "config.json";
  std::ofstream(path) << text;
  return path;
}

TEST(Cli, DimensionTwoRejected) {
  const auto dir = scratch("n2");
  const auto cfg = write_config(dir, R"({"models": [{"family": "euclidean", "n": 2}]})");
  const auto r = run("run --config " + cfg.string() + " --out " + (dir / "out").string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("models[0].n"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir / "out" / "checks.json"));
}

TEST(Cli, MalformedJson) {
  const auto dir = scratch("bad");
  const auto cfg = write_config(dir, "{\"models\": [");
  EXPECT_EQ(run("run --config " + cfg.string()).status, 2);
  EXPECT_EQ(run("run --config " + (dir / "missing.json").string()).status, 2);
}

TEST(Cli, ZeroSignToleranceOnSmoothedCone) {
  const auto dir = scratch("sign");
  const auto cfg = write_config(dir, R"({
    "models": [{"family": "smoothed_cone", "params": {"alpha": 0.5}}],
    "suites": ["monotone"],
    "t_grid": {"count": 8},
    "tolerances": {"monotone.sign": 0}
  })");
  const auto out = dir / "out";
  const auto r = run("run --config " + cfg.string() + " --out " + out.string() + " --jobs 2");
  EXPECT_EQ(r.status, 0) << r.output;
  for (const char* f : {"monotone.csv", "checks.json", "mcf_traces.csv", "summary.txt"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  std::ifstream in(out / "checks.json");
  const auto j = nlohmann::json::parse(in);
  bool saw_sign = false;
  for (const auto& rep : j) {
    if (rep["check"] == "sign") {
      saw_sign = true;
      EXPECT_EQ(rep["tolerance"], 0.0);
      EXPECT_EQ(rep["status"], "PASS");
    }
  }
  EXPECT_TRUE(saw_sign);
}

TEST(Cli, FailureExitsOne) {
  const auto dir = scratch("fail");
  const auto cfg = write_config(dir, R"({
    "models": [{"family": "smoothed_cone", "params": {"alpha": 0.5}}],
    "suites": ["monotone"],
    "t_grid": {"count": 8},
    "tolerances": {"monotone.derivative_fd": 0}
  })");
  const auto r = run("run --config " + cfg.string() + " --out " + (dir / "out").string());
  EXPECT_EQ(r.status, 1) << r.output;
  EXPECT_NE(r.output.find("derivative_fd"), std::string::npos);
}

TEST(Cli, ListModels) {
  const auto r = run("list-models");
  EXPECT_EQ(r.status, 0);
  for (const char* needle : {"cone", "alpha^{n-1}", "tanh", "parabolic", "power", "Sub-Euclidean"}) {
    EXPECT_NE(r.output.find(needle), std::string::npos) << needle;
  }
}

TEST(Cli, CheckSubcommand) {
  const auto ok = run("check willmore --model cone:alpha=0.5:n=3");
  EXPECT_EQ(ok.status, 0) << ok.output;
  EXPECT_NE(ok.output.find("EQUALITY"), std::string::npos);
  EXPECT_EQ(run("check willmore --model cone:alpha=0.5:n=2").status, 2);
  EXPECT_EQ(run("check shapes --model cone:alpha=0.5").status, 2);
  EXPECT_EQ(run("check geometry --model cone alpha=zero").status, 2);
}

TEST(Cli, Usage) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST(Cli, JobsEnvironmentValidated) {
  const auto r = run("list-models");
  EXPECT_EQ(r.status, 0);
  const std::string cmd = std::string("CAPMONO_JOBS=zero ") + CAPMONO_CLI + " check geometry --model euclidean >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(raw), 2);
}

}  // namespace
