#ifndef CAPMONO_CONFIG_HPP
#define CAPMONO_CONFIG_HPP

// Experiment configuration: the JSON schema read by `capmono run --config`,
// validation with key-path diagnostics, and model construction.

#include <cmath>
#include <fstream>
#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "capmono/error.hpp"
#include "capmono/format.hpp"
#include "capmono/geometry.hpp"
#include "capmono/potential.hpp"

namespace capmono::cli {

/// Rejected configuration; key() is the offending path, e.g. "models[0].n".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ModelEntry {
  std::string family;
  std::map<std::string, double> params;
  int n = 3;
  double omega_factor = 1.0;
};

struct GridSpec {
  int count = 64;
  bool geometric = true;
  double from = 1.0;
  double to = 1e-4;

  std::vector<double> points() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double x = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      out.push_back(geometric ? from * std::pow(to / from, x) : from + (to - from) * x);
    }
    if (count > 1) out.back() = to;
    return out;
  }
};

inline const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> suites{"geometry", "potential", "monotone", "willmore", "mcf"};
  return suites;
}

struct ExperimentConfig {
  std::vector<ModelEntry> models;
  double r0 = 1.0;
  std::vector<double> betas;  // empty: {(n-2)/(n-1), 1, n-2, 3} per dimension
  GridSpec t_grid{64, true, 1.0, 1e-4};
  GridSpec s_grid{64, false, 0.0, 5.0};
  std::vector<double> mcf_rho0{1.0, 5.0};
  std::set<std::string> suites{all_suites().begin(), all_suites().end()};
  std::map<std::string, double> tolerances;  // "suite.check" -> tolerance
  std::string output_dir = "capmono_out";
  int parallelism = 0;  // 0: hardware concurrency
};

/// The shipped model set.
inline std::vector<ModelEntry> default_models() {
  std::vector<ModelEntry> out;
  for (int n : {3, 4, 5}) {
    out.push_back({"euclidean", {}, n, 1.0});
    for (double a : {0.3, 0.5, 0.7, 0.9}) out.push_back({"cone", {{"alpha", a}}, n, 1.0});
    for (double a : {0.3, 0.5, 0.7}) out.push_back({"smoothed_cone", {{"alpha", a}}, n, 1.0});
    out.push_back({"power", {{"gamma", 0.6}}, n, 1.0});
    out.push_back({"tanh", {}, n, 1.0});
    out.push_back({"cylinder_end", {}, n, 1.0});
  }
  // R^4 / Z_2: unit-slope cone over a half-area cross-section.
  out.push_back({"cone", {{"alpha", 1.0}}, 4, 0.5});
  out.push_back({"spheroid", {{"a", 2.0}, {"b", 1.0}}, 3, 1.0});
  return out;
}

inline ExperimentConfig default_config() {
  ExperimentConfig c;
  c.models = default_models();
  return c;
}

struct FamilyInfo {
  std::string name;
  std::vector<std::string> params;
  std::string description;
};

inline const std::vector<FamilyInfo>& families() {
  static const std::vector<FamilyInfo> table{
      {"euclidean", {}, "f = r. Nonparabolic, AVR = 1 (times omega factor)."},
      {"cone", {"alpha"},
       "f = alpha r, alpha in (0, 1]. Nonparabolic, AVR = alpha^{n-1} (times omega factor); "
       "equality case of every monotone quantity."},
      {"smoothed_cone", {"alpha"},
       "f = alpha r + (1 - alpha)(1 - e^{-r}), alpha in (0, 1]. Smooth pole, Ric >= 0, "
       "nonparabolic, AVR = alpha^{n-1}."},
      {"power", {"gamma"},
       "f = r^gamma on [gamma^{1/(1-gamma)}, inf), gamma in (0, 1). Sub-Euclidean: AVR = 0; "
       "nonparabolic when gamma (n-1) > 1, parabolic otherwise."},
      {"tanh", {}, "f = tanh r. Bounded warp: parabolic, AVR = 0."},
      {"cylinder_end", {}, "f = 1 on [0, inf). Cylindrical end: parabolic, AVR = 0, H = 0."},
      {"spheroid", {"a", "b"},
       "Prolate spheroid with semi-axes a >= b > 0 in R^3 (n = 3 only). Euclidean exterior, AVR = 1."},
  };
  return table;
}

inline std::string list_models() {
  auto pad = [](std::string s, std::size_t width) {
    s.resize(std::max(width, s.size() + 1), ' ');
    return s;
  };
  std::ostringstream out;
  out << pad("family", 16) << pad("parameters", 13) << "notes\n";
  for (const auto& f : families()) {
    std::string params;
    for (const auto& p : f.params) params += (params.empty() ? "" : ",") + p;
    out << pad(f.name, 16) << pad(params.empty() ? "-" : params, 13) << f.description << "\n";
  }
  out << "\nAll warped families take n >= 3 and an omega factor in (0, 1] scaling the cross-section area.\n";
  return out.str();
}

/// A built model: a warped manifold or a spheroid in R^3.
struct BuiltModel {
  std::shared_ptr<const ModelManifold> manifold;  // null for spheroids
  std::optional<SpheroidPotential> spheroid;
  std::string id;
  int n = 3;

  bool is_spheroid() const { return spheroid.has_value(); }
};

inline std::string spheroid_id(double a, double b) {
  return "spheroid:a=" + format_number(a) + ":b=" + format_number(b) + ":n=3";
}

/// Builds the model of entry `index`; errors name the offending key.
inline BuiltModel build_model(const ModelEntry& e, std::size_t index, double r0) {
  const std::string base = "models[" + std::to_string(index) + "]";
  const FamilyInfo* info = nullptr;
  for (const auto& f : families()) {
    if (f.name == e.family) info = &f;
  }
  if (!info) throw ConfigError(base + ".family", "unknown family '" + e.family + "'");
  for (const auto& [k, v] : e.params) {
    if (std::find(info->params.begin(), info->params.end(), k) == info->params.end()) {
      throw ConfigError(base + ".params." + k, "not a parameter of " + e.family);
    }
    if (!std::isfinite(v)) throw ConfigError(base + ".params." + k, "must be finite");
  }
  if (e.n < 3) throw ConfigError(base + ".n", "dimension must be >= 3, got " + std::to_string(e.n));
  if (!(e.omega_factor > 0.0 && e.omega_factor <= 1.0)) {
    throw ConfigError(base + ".omega_factor", "must lie in (0, 1]");
  }
  auto param = [&](const std::string& k) {
    auto it = e.params.find(k);
    if (it == e.params.end()) throw ConfigError(base + ".params." + k, "missing for " + e.family);
    return it->second;
  };

  BuiltModel out;
  out.n = e.n;
  if (e.family == "spheroid") {
    if (e.n != 3) throw ConfigError(base + ".n", "spheroids live in R^3");
    if (e.omega_factor != 1.0) throw ConfigError(base + ".omega_factor", "spheroids need omega factor 1");
    const double a = param("a"), b = param("b");
    if (!(b > 0.0)) throw ConfigError(base + ".params.b", "must be > 0");
    if (!(a >= b)) throw ConfigError(base + ".params.a", "must be >= b (prolate)");
    out.spheroid = spheroid_exterior(a, b);
    out.id = spheroid_id(a, b);
    return out;
  }

  WarpProfile w;
  try {
    if (e.family == "euclidean") {
      w = profiles::euclidean();
    } else if (e.family == "cone") {
      const double a = param("alpha");
      if (!(a > 0.0 && a <= 1.0)) throw ConfigError(base + ".params.alpha", "must lie in (0, 1]");
      w = profiles::cone(a);
    } else if (e.family == "smoothed_cone") {
      const double a = param("alpha");
      if (!(a > 0.0 && a <= 1.0)) throw ConfigError(base + ".params.alpha", "must lie in (0, 1]");
      w = profiles::smoothed_cone(a);
    } else if (e.family == "power") {
      const double g = param("gamma");
      if (!(g > 0.0 && g < 1.0)) throw ConfigError(base + ".params.gamma", "must lie in (0, 1)");
      w = profiles::power(g);
    } else if (e.family == "tanh") {
      w = profiles::tanh_profile();
    } else {
      w = profiles::cylinder_end();
    }
  } catch (const Error& err) {
    throw ConfigError(base + ".params", err.what());
  }
  if (!w.in_domain(r0) || !(w.f(r0) > 0.0)) {
    throw ConfigError("r0", "outside the domain of " + e.family + " (r_min = " + format_number(w.r_min) + ")");
  }
  out.manifold = std::make_shared<const ModelManifold>(e.n, std::move(w), e.omega_factor);
  out.id = out.manifold->id();
  return out;
}

/// {(n-2)/(n-1), 1, n-2, 3}, sorted, duplicates removed.
inline std::vector<double> default_betas(int n) {
  std::vector<double> b{static_cast<double>(n - 2) / (n - 1), 1.0, static_cast<double>(n - 2), 3.0};
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

namespace detail {

using nlohmann::json;

inline double read_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

inline int read_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError(key, "expected an integer");
  return j.get<int>();
}

inline GridSpec read_grid(const json& j, const std::string& key, GridSpec grid) {
  if (!j.is_object()) throw ConfigError(key, "expected an object {count, spacing, range}");
  for (const auto& [k, v] : j.items()) {
    if (k == "count") {
      grid.count = read_int(v, key + ".count");
      if (grid.count < 2) throw ConfigError(key + ".count", "need at least 2 points");
    } else if (k == "spacing") {
      if (!v.is_string() || (v != "geometric" && v != "linear")) {
        throw ConfigError(key + ".spacing", "expected \"geometric\" or \"linear\"");
      }
      grid.geometric = v == "geometric";
    } else if (k == "range") {
      if (!v.is_array() || v.size() != 2) throw ConfigError(key + ".range", "expected [from, to]");
      grid.from = read_number(v[0], key + ".range[0]");
      grid.to = read_number(v[1], key + ".range[1]");
    } else {
      throw ConfigError(key + "." + k, "unknown key");
    }
  }
  if (grid.geometric && !(grid.from > 0.0 && grid.to > 0.0)) {
    throw ConfigError(key + ".range", "geometric grids need positive endpoints");
  }
  return grid;
}

}  // namespace detail

/// Parses and validates a configuration document. Missing keys keep their
/// defaults; a missing "models" list selects the shipped model set.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::read_int;
  using detail::read_number;
  ExperimentConfig c = default_config();
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");

  for (const auto& [key, v] : j.items()) {
    if (key == "models") {
      if (!v.is_array() || v.empty()) throw ConfigError("models", "expected a non-empty list");
      c.models.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string base = "models[" + std::to_string(i) + "]";
        const auto& mj = v[i];
        if (!mj.is_object()) throw ConfigError(base, "expected an object");
        ModelEntry e;
        bool has_family = false;
        for (const auto& [mk, mv] : mj.items()) {
          if (mk == "family") {
            if (!mv.is_string()) throw ConfigError(base + ".family", "expected a string");
            e.family = mv.get<std::string>();
            has_family = true;
          } else if (mk == "params") {
            if (!mv.is_object()) throw ConfigError(base + ".params", "expected an object");
            for (const auto& [pk, pv] : mv.items()) e.params[pk] = read_number(pv, base + ".params." + pk);
          } else if (mk == "n") {
            e.n = read_int(mv, base + ".n");
          } else if (mk == "omega_factor") {
            e.omega_factor = read_number(mv, base + ".omega_factor");
          } else {
            throw ConfigError(base + "." + mk, "unknown key");
          }
        }
        if (!has_family) throw ConfigError(base + ".family", "missing");
        c.models.push_back(std::move(e));
      }
    } else if (key == "r0") {
      c.r0 = read_number(v, "r0");
      if (!(c.r0 > 0.0)) throw ConfigError("r0", "must be > 0");
    } else if (key == "betas") {
      if (!v.is_array() || v.empty()) throw ConfigError("betas", "expected a non-empty list");
      c.betas.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double b = read_number(v[i], "betas[" + std::to_string(i) + "]");
        if (!(b > 0.0)) throw ConfigError("betas[" + std::to_string(i) + "]", "must be > 0");
        c.betas.push_back(b);
      }
    } else if (key == "t_grid") {
      c.t_grid = detail::read_grid(v, "t_grid", c.t_grid);
      for (double t : {c.t_grid.from, c.t_grid.to}) {
        if (!(t > 0.0 && t <= 1.0)) throw ConfigError("t_grid.range", "levels must lie in (0, 1]");
      }
    } else if (key == "s_grid") {
      c.s_grid = detail::read_grid(v, "s_grid", c.s_grid);
      for (double s : {c.s_grid.from, c.s_grid.to}) {
        if (!(s >= 0.0)) throw ConfigError("s_grid.range", "levels must be >= 0");
      }
    } else if (key == "mcf_rho0") {
      if (!v.is_array() || v.empty()) throw ConfigError("mcf_rho0", "expected a non-empty list");
      c.mcf_rho0.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = read_number(v[i], "mcf_rho0[" + std::to_string(i) + "]");
        if (!(r > 0.0)) throw ConfigError("mcf_rho0[" + std::to_string(i) + "]", "must be > 0");
        c.mcf_rho0.push_back(r);
      }
    } else if (key == "suites") {
      if (!v.is_array()) throw ConfigError("suites", "expected a list");
      c.suites.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string k = "suites[" + std::to_string(i) + "]";
        if (!v[i].is_string()) throw ConfigError(k, "expected a string");
        const auto name = v[i].get<std::string>();
        if (std::find(all_suites().begin(), all_suites().end(), name) == all_suites().end()) {
          throw ConfigError(k, "unknown suite '" + name + "'");
        }
        c.suites.insert(name);
      }
    } else if (key == "tolerances") {
      if (!v.is_object()) throw ConfigError("tolerances", "expected an object");
      for (const auto& [tk, tv] : v.items()) {
        const std::string k = "tolerances." + tk;
        const auto dot = tk.find('.');
        if (dot == std::string::npos ||
            std::find(all_suites().begin(), all_suites().end(), tk.substr(0, dot)) == all_suites().end()) {
          throw ConfigError(k, "expected \"<suite>.<check>\"");
        }
        const double tol = read_number(tv, k);
        if (!(tol >= 0.0)) throw ConfigError(k, "must be >= 0");
        c.tolerances[tk] = tol;
      }
    } else if (key == "output_dir") {
      if (!v.is_string()) throw ConfigError("output_dir", "expected a string");
      c.output_dir = v.get<std::string>();
    } else if (key == "parallelism") {
      c.parallelism = read_int(v, "parallelism");
      if (c.parallelism < 0) throw ConfigError("parallelism", "must be >= 0");
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  // Reject bad models before any computation.
  for (std::size_t i = 0; i < c.models.size(); ++i) (void)build_model(c.models[i], i, c.r0);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace capmono::cli

#endif  // CAPMONO_CONFIG_HPP
