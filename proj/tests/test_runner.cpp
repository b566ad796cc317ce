#include <gtest/gtest.h>

#include "capmono/runner.hpp"

namespace {

using namespace capmono;
using namespace capmono::cli;
using nlohmann::json;

ExperimentConfig small_config() {
  return parse_config(json::parse(R"({
    "models": [{"family": "cone", "params": {"alpha": 0.5}},
               {"family": "smoothed_cone", "params": {"alpha": 0.5}},
               {"family": "tanh"},
               {"family": "spheroid", "params": {"a": 2, "b": 1}}],
    "betas": [1],
    "t_grid": {"count": 8, "spacing": "geometric", "range": [1, 1e-4]},
    "s_grid": {"count": 8, "spacing": "linear", "range": [0, 5]},
    "mcf_rho0": [1]
  })"));
}

const CheckReport* find(const RunResult& run, const std::string& check, const std::string& model_prefix) {
  for (const auto& r : run.reports) {
    if (r.check == check && r.model.rfind(model_prefix, 0) == 0) return &r;
  }
  return nullptr;
}

TEST(Runner, SmallConfigPasses) {
  const auto run = run_experiment(small_config(), 1);
  for (const auto& r : run.reports) EXPECT_FALSE(r.failed()) << r.suite << "." << r.check << " " << r.model;
  EXPECT_EQ(exit_status(run), 0);
  EXPECT_FALSE(run.rows.empty());
  EXPECT_FALSE(run.traces.empty());
  ASSERT_NE(find(run, "inequality", "cone:alpha=0.5:n=3/"), nullptr);
  EXPECT_EQ(find(run, "inequality", "cone:alpha=0.5:n=3/")->status, CheckStatus::Equality);
  ASSERT_NE(find(run, "spheroid_sequence", "spheroid"), nullptr);
}

TEST(Runner, ParallelMatchesSerial) {
  const auto cfg = small_config();
  const auto serial = run_experiment(cfg, 1);
  const auto parallel = run_experiment(cfg, 4);
  EXPECT_EQ(checks_json(serial.reports), checks_json(parallel.reports));
  EXPECT_EQ(monotone_csv(serial.rows), monotone_csv(parallel.rows));
  EXPECT_EQ(traces_csv(serial.traces), traces_csv(parallel.traces));
}

TEST(Runner, ZeroSignToleranceStillPasses) {
  auto cfg = small_config();
  cfg.models = {{"smoothed_cone", {{"alpha", 0.5}}, 3, 1.0}, {"smoothed_cone", {{"alpha", 0.3}}, 5, 1.0}};
  cfg.tolerances["monotone.sign"] = 0.0;
  const auto run = run_experiment(cfg, 2);
  const auto* sign = find(run, "sign", "smoothed_cone");
  ASSERT_NE(sign, nullptr);
  EXPECT_EQ(sign->tolerance, 0.0);
  EXPECT_EQ(sign->max_violation, 0.0);
  EXPECT_EQ(exit_status(run), 0);
}

TEST(Runner, ToleranceOverrideCanFail) {
  auto cfg = small_config();
  cfg.tolerances["monotone.derivative_fd"] = 0.0;
  const auto run = run_experiment(cfg, 2);
  const auto* fd = find(run, "derivative_fd", "smoothed_cone");
  ASSERT_NE(fd, nullptr);
  EXPECT_EQ(fd->status, CheckStatus::Fail);
  EXPECT_EQ(exit_status(run), 1);
  EXPECT_NE(summary_counts(run.reports).find("monotone.derivative_fd"), std::string::npos);
}

TEST(Runner, SuiteSelection) {
  auto cfg = small_config();
  cfg.suites = {"geometry"};
  const auto run = run_experiment(cfg, 1);
  ASSERT_FALSE(run.reports.empty());
  for (const auto& r : run.reports) EXPECT_EQ(r.suite, "geometry");
  EXPECT_TRUE(run.rows.empty());
}

TEST(Runner, TaskErrorBecomesFailure) {
  const Task task{"potential", "broken", [] () -> TaskOutput { throw Error(ErrorKind::NonConvergence, "boom"); }};
  const auto out = run_task(task);
  ASSERT_EQ(out.reports.size(), 1u);
  EXPECT_EQ(out.reports[0].check, "error.NonConvergence");
  EXPECT_TRUE(out.reports[0].failed());
}

TEST(Runner, CsvHeaders) {
  EXPECT_EQ(monotone_csv({}), "model,n,beta,kind,level,r_level,value,d_surface,d_bulk,d_fd,H,grad_conf\n");
  EXPECT_EQ(traces_csv({}), "model,t,rho,area,volume,D\n");
}

TEST(Runner, JsonShape) {
  const auto j = json::parse(checks_json({make_report("mcf", "extinction", "m", 0.5, 1.0, 3, {{"rho0", 1.0}})}));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["status"], "PASS");
  EXPECT_EQ(j[0]["samples"], 3);
  EXPECT_EQ(j[0]["params"]["rho0"], 1.0);
}

}  // namespace
