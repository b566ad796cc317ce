// capmono: runs the verification suites on warped-product models.
//
//   capmono run [--config PATH] [--out DIR] [--jobs N]
//   capmono list-models
//   capmono check <suite> --model <id> [key=value ...]
//
// Exit status: 0 when no check failed, 1 when some check failed, 2 on a
// configuration or usage error.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "capmono/config.hpp"
#include "capmono/runner.hpp"

namespace {

using capmono::cli::ConfigError;

constexpr int kUsageError = 2;

// "cone:alpha=0.5:n=3" plus loose "key=value" words into one model entry.
// n, omega and r0 are recognised as model/config keys, beta restricts betas.
capmono::cli::ExperimentConfig check_config(const std::string& suite, const std::string& model_id,
                                            const std::vector<std::string>& extra) {
  auto cfg = capmono::cli::default_config();
  if (std::find(capmono::cli::all_suites().begin(), capmono::cli::all_suites().end(), suite) ==
      capmono::cli::all_suites().end()) {
    throw ConfigError("suite", "unknown suite '" + suite + "'");
  }
  cfg.suites = {suite};

  std::vector<std::string> words;
  std::string family;
  {
    std::size_t start = 0;
    while (true) {
      const auto colon = model_id.find(':', start);
      const auto word = model_id.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
      if (start == 0) {
        family = word;
      } else if (!word.empty()) {
        words.push_back(word);
      }
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
  }
  words.insert(words.end(), extra.begin(), extra.end());

  capmono::cli::ModelEntry entry;
  entry.family = family;
  for (const auto& w : words) {
    const auto eq = w.find('=');
    if (eq == std::string::npos) throw ConfigError(w, "expected key=value");
    const std::string key = w.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(w.substr(eq + 1), &used);
      if (used != w.size() - eq - 1) throw std::invalid_argument(w);
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a number, got '" + w.substr(eq + 1) + "'");
    }
    if (key == "n") {
      if (value != std::floor(value)) throw ConfigError("n", "expected an integer");
      entry.n = static_cast<int>(value);
    } else if (key == "omega" || key == "omega_factor") {
      entry.omega_factor = value;
    } else if (key == "r0") {
      if (!(value > 0.0)) throw ConfigError("r0", "must be > 0");
      cfg.r0 = value;
    } else if (key == "beta") {
      if (!(value > 0.0)) throw ConfigError("beta", "must be > 0");
      cfg.betas.push_back(value);
    } else {
      entry.params[key] = value;
    }
  }
  cfg.models = {entry};
  (void)capmono::cli::build_model(cfg.models[0], 0, cfg.r0);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set monotonicity checks on warped-product models"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "Run the configured suites and write the report files");
  run->add_option("--config", config_path, "JSON experiment configuration (default: built-in model set)");
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--jobs", jobs, "Worker threads (CAPMONO_JOBS overrides)")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-models", "Describe the model families");

  std::string suite, model_id;
  std::vector<std::string> extra;
  auto* check = app.add_subcommand("check", "Run one suite on one model and print the reports");
  check->add_option("suite", suite, "geometry | potential | monotone | willmore | mcf")->required();
  check->add_option("--model", model_id, "Model id, e.g. cone:alpha=0.5:n=3")->required();
  check->add_option("params", extra, "Extra key=value parameters (n, omega, r0, beta, family parameters)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (list->parsed()) {
      std::cout << capmono::cli::list_models();
      return 0;
    }
    if (run->parsed()) {
      auto cfg = config_path.empty() ? capmono::cli::default_config() : capmono::cli::load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (jobs > 0) cfg.parallelism = jobs;
      const int workers = capmono::cli::resolve_workers(cfg.parallelism);
      const auto result = capmono::cli::run_experiment(cfg, workers);
      capmono::cli::write_outputs(cfg.output_dir, result);
      std::cout << capmono::cli::summary_counts(result.reports);
      return capmono::cli::exit_status(result);
    }
    if (check->parsed()) {
      const auto cfg = check_config(suite, model_id, extra);
      const auto result = capmono::cli::run_experiment(cfg, capmono::cli::resolve_workers(cfg.parallelism));
      std::cout << capmono::cli::summary_text(result.reports);
      return capmono::cli::exit_status(result);
    }
  } catch (const ConfigError& e) {
    std::cerr << "capmono: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "capmono: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
