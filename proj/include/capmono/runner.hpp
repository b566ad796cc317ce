#ifndef CAPMONO_RUNNER_HPP
#define CAPMONO_RUNNER_HPP

// Experiment runner: turns a configuration into independent tasks, runs them
// on a bounded worker pool and writes monotone.csv, checks.json,
// mcf_traces.csv and summary.txt. Outputs are assembled in task order, so the
// files do not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "capmono/config.hpp"
#include "capmono/format.hpp"
#include "capmono/geometry.hpp"
#include "capmono/mcf.hpp"
#include "capmono/monotone.hpp"
#include "capmono/potential.hpp"
#include "capmono/report.hpp"
#include "capmono/willmore.hpp"

namespace capmono::cli {

struct MonotoneRow {
  std::string model;
  int n = 0;
  std::string kind;
  MonotoneSample sample;
};

struct TraceRow {
  std::string model;
  double t, rho, area, volume, D;
};

struct TaskOutput {
  std::vector<CheckReport> reports;
  std::vector<MonotoneRow> rows;
  std::vector<TraceRow> traces;
};

struct Task {
  std::string suite;
  std::string model;
  std::function<TaskOutput()> body;
};

struct RunResult {
  std::vector<CheckReport> reports;
  std::vector<MonotoneRow> rows;
  std::vector<TraceRow> traces;

  bool any_failed() const {
    return std::any_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.failed(); });
  }
};

namespace detail {

// Relative deviation, with 0/0 read as agreement.
inline double rel_dev(double a, double b, double scale) {
  const double d = std::abs(a - b);
  if (d == 0.0) return 0.0;
  return d / scale;
}

// Deterministic uniform [0, 1) from a 64-bit Mersenne twister, independent
// of the standard library's distribution implementations.
class UnitStream {
 public:
  explicit UnitStream(std::uint64_t seed) : gen_(seed) {}
  double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

inline bool is_rigid_warp(const ModelManifold& m, double r_from) {
  return m.d2f(r_from) == 0.0 && warp_curvature_sup(m, r_from) == 0.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// geometry

inline std::vector<CheckReport> geometry_checks(const ModelManifold& m, double r0) {
  const std::string suite = "geometry", model = m.id();
  std::vector<CheckReport> out;
  const auto& w = m.warp();

  const auto [lo, hi] = admissibility_window(m);
  const double ric = min_ricci(m, lo, hi);
  out.push_back(make_report(suite, "admissibility", model, std::max(0.0, -ric), 1e-12, 0, {{"min_ricci", ric}}));

  try {
    const auto kind = classify_parabolicity(m, r0);
    out.push_back(make_report(suite, "parabolicity", model, 0.0, 0.0, 1,
                              {{"nonparabolic", kind == Parabolicity::Nonparabolic ? 1.0 : 0.0},
                               {"tail_exponent", tail_decay_exponent(m)},
                               {"avr", avr(m)}}));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CriterionMismatch) throw;
    out.push_back(make_report(suite, "parabolicity", model, 1.0, 0.0, 1));
  }

  const double r_far = 1e4 * std::max(1.0, w.tail_radius);
  if (w.origin_closed) {
    const auto grid = capmono::detail::geometric_grid(1e-4, r_far, 200);
    double worst = 0.0;
    BishopGromov prev = bishop_gromov(m, grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const BishopGromov cur = bishop_gromov(m, grid[i]);
      worst = std::max({worst, cur.volume_ratio - prev.volume_ratio, cur.area_ratio - prev.area_ratio});
      prev = cur;
    }
    out.push_back(make_report(suite, "bishop_gromov.monotone", model, worst, 1e-10, grid.size()));
  } else {
    out.push_back(not_applicable(suite, "bishop_gromov.monotone", model));
  }

  if (w.smooth_origin && m.omega_factor() == 1.0) {
    const auto bg = bishop_gromov(m, 1e-4);
    out.push_back(make_report(suite, "bishop_gromov.origin", model,
                              std::max(std::abs(bg.volume_ratio - 1.0), std::abs(bg.area_ratio - 1.0)), 1e-3, 1,
                              {{"volume_ratio", bg.volume_ratio}, {"area_ratio", bg.area_ratio}}));
  } else {
    out.push_back(not_applicable(suite, "bishop_gromov.origin", model));
  }

  const double theta_far = avr_from_areas(m, 1e4);
  out.push_back(make_report(suite, "bishop_gromov.avr", model, std::abs(theta_far - avr(m)), 1e-3, 1,
                            {{"area_ratio", theta_far}, {"avr", avr(m)}}));
  return out;
}

// ---------------------------------------------------------------------------
// potential

inline std::vector<CheckReport> potential_checks(const PotentialSolution& sol) {
  const std::string suite = "potential";
  const auto& m = sol.manifold();
  const std::string model = m.id();
  const int n = m.n();
  const double r0 = sol.r0();
  std::vector<CheckReport> out = verify_asymptotics(sol);

  {
    // u'' from finite differences of u' against -(n-1)(f'/f) u'.
    detail::UnitStream rng(0x5eed5eedULL);
    const double sign = sol.nonparabolic() ? -1.0 : 1.0;
    auto du = [&](double r) { return sign * sol.grad_mag(r); };
    double worst = 0.0;
    const int count = 1000;
    for (int i = 0; i < count; ++i) {
      const double r = r0 * std::pow(1e3, 1e-3 + (1.0 - 1e-3) * rng.next());
      const double ddu = numerics::central_diff(du, r, 1e-3 * r).value;
      const double drift = (n - 1) * m.df(r) / m.f(r);
      const double residual = std::abs(ddu + drift * du(r));
      // f'/f decays exponentially on asymptotically cylindrical warps; 1/r
      // keeps the reference above the difference-quotient noise there.
      const double scale = std::abs(du(r)) * std::max(std::abs(drift), 1.0 / r);
      worst = std::max(worst, residual == 0.0 ? 0.0 : residual / scale);
    }
    out.push_back(make_report(suite, "harmonic_residual", model, worst, 1e-8, count));
  }

  {
    const auto grid = capmono::detail::geometric_grid(r0 * (1.0 + 1e-6), 1e6 * r0, 200);
    double bad = 0.0;
    double prev = sol.value(r0);
    for (double r : grid) {
      const double v = sol.value(r);
      const bool inside = sol.nonparabolic() ? (v > 0.0 && v < 1.0 && v < prev) : (v > 0.0 && v > prev);
      if (!inside) bad += 1.0;
      prev = v;
    }
    out.push_back(make_report(suite, "max_principle", model, bad, 0.0, grid.size()));
  }

  if (sol.nonparabolic()) {
    const auto& w = m.warp();
    const double cap = sol.capacity();
    if (w.family == "cone" || w.family == "euclidean") {
      const double alpha = w.family == "cone" ? w.params.at("alpha") : 1.0;
      const double expected = m.omega_factor() * std::pow(alpha, n - 1) * std::pow(r0, n - 2);
      out.push_back(make_report(suite, "capacity", model, std::abs(cap - expected) / expected, 1e-12, 1,
                                {{"capacity", cap}, {"expected", expected}}));
    } else {
      out.push_back(make_report(suite, "capacity", model, cap > 0.0 ? 0.0 : 1.0, 0.0, 1, {{"capacity", cap}}));
    }

    double worst = 0.0;
    for (double r : {r0, 10.0 * r0, 1e3 * r0}) {
      const double direct = sol.tail_integral_direct(r);
      worst = std::max(worst, std::abs(sol.tail_integral(r) - direct) / direct);
    }
    out.push_back(make_report(suite, "tail_oracle", model, worst, 1e-9, 3));
  } else {
    out.push_back(not_applicable(suite, "capacity", model));
    out.push_back(not_applicable(suite, "tail_oracle", model));
  }
  return out;
}

// ---------------------------------------------------------------------------
// monotone

namespace detail {

inline void add_rows(TaskOutput& out, const MonotoneSeries& series, const std::string& model) {
  for (const auto& s : series.samples) out.rows.push_back({model, series.n, std::string(to_string(series.kind)), s});
}

struct DerivativeSpread {
  double sign = 0.0;  // worst wrong-signed derivative / scale
  double fd = 0.0;
  double bulk = 0.0;
};

inline DerivativeSpread derivative_spread(const MonotoneSeries& series, double scale, bool decreasing) {
  DerivativeSpread d;
  for (const auto& s : series.samples) {
    const double denom = std::max(std::abs(s.d_surface), scale);
    d.sign = std::max(d.sign, std::max(0.0, decreasing ? s.d_surface : -s.d_surface) / scale);
    d.fd = std::max(d.fd, rel_dev(s.d_surface, s.d_fd, denom));
    if (!std::isnan(s.d_bulk)) d.bulk = std::max(d.bulk, rel_dev(s.d_surface, s.d_bulk, denom));
  }
  return d;
}

}  // namespace detail

inline TaskOutput monotone_u_task(const PotentialSolution& sol, double beta, const ExperimentConfig& cfg) {
  const std::string suite = "monotone";
  const auto& m = sol.manifold();
  const std::string model = m.id();
  const int n = m.n();
  TaskOutput out;
  const std::map<std::string, double> tag{{"beta", beta}};

  const auto series = u_series(sol, beta, cfg.t_grid.points(), true);
  detail::add_rows(out, series, model);
  MonotoneSeries phi;
  phi.kind = SeriesKind::Phi;
  phi.n = n;
  phi.beta = beta;
  for (double s : cfg.s_grid.points()) phi.samples.push_back(phi_beta(sol, beta, s));
  detail::add_rows(out, phi, model);

  if (beta < beta_threshold(n) - 1e-15) {
    // Below the threshold nothing is claimed; the rows are kept for inspection.
    out.reports.push_back(not_applicable(suite, "below_threshold", model, tag));
    return out;
  }

  const double scale = u_beta(sol, beta, 1.0).value;
  const std::size_t count = series.samples.size();
  out.reports.push_back(make_report(suite, "monotonicity", model, monotonicity_violation(series, scale), 1e-9, count, tag));
  const auto spread = detail::derivative_spread(series, scale, false);
  out.reports.push_back(make_report(suite, "sign", model, spread.sign, 1e-10, count, tag));
  out.reports.push_back(make_report(suite, "derivative_fd", model, spread.fd, 1e-6, count, tag));
  out.reports.push_back(make_report(suite, "derivative_bulk", model, spread.bulk, 1e-4, count, tag));

  {
    auto params = tag;
    params["extrapolated"] = series.limit_value;
    params["formula"] = series.limit_formula;
    params["u_beta_1"] = scale;
    if (series.limit_formula > 0.0) {
      const double violation = std::abs(series.limit_value - series.limit_formula) /
                               std::max(series.limit_formula, 1e-3 * scale);
      out.reports.push_back(make_report(suite, "limit", model, violation, 1e-2, 3, params));
    } else {
      // AVR = 0: the limit vanishes.
      out.reports.push_back(make_report(suite, "limit", model, std::abs(series.limit_value) / scale, 1e-3, 3, params));
    }
  }

  if (detail::is_rigid_warp(m, sol.r0())) {
    // Derivatives in log t: t dU/dt is what a relative perturbation of the
    // level sees, and keeps the difference quotient above rounding at t ~ 1e-4.
    double value_dev = 0.0, deriv = 0.0;
    for (const auto& s : series.samples) {
      value_dev = std::max(value_dev, std::abs(s.value - series.limit_formula) / series.limit_formula);
      deriv = std::max({deriv, s.level * std::abs(s.d_surface) / scale, s.level * std::abs(s.d_bulk) / scale,
                        s.level * std::abs(s.d_fd) / scale});
    }
    auto params = tag;
    params["value_dev"] = value_dev;
    params["log_derivative"] = deriv;
    out.reports.push_back(make_report(suite, "rigidity", model, std::max(value_dev, deriv), 1e-10, count, params));
  } else {
    out.reports.push_back(not_applicable(suite, "rigidity", model, tag));
  }

  {
    double worst = 0.0;
    for (const auto& p : phi.samples) {
      const double direct = u_beta(sol, beta, std::exp(-p.level)).value;
      worst = std::max(worst, detail::rel_dev(p.value, direct, std::abs(direct)));
    }
    out.reports.push_back(make_report(suite, "phi_consistency", model, worst, 1e-12, phi.samples.size(), tag));
  }

  if (beta == 1.0 || beta == n - 2.0) {
    for (auto& r : relation_check(sol, beta, cfg.s_grid.points())) {
      r.params["beta"] = beta;
      out.reports.push_back(std::move(r));
    }
  }
  return out;
}

inline TaskOutput monotone_model_task(const PotentialSolution& sol) {
  const std::string suite = "monotone";
  const auto& m = sol.manifold();
  const std::string model = m.id();
  TaskOutput out;

  {
    double worst = 0.0;
    const auto grid = capmono::detail::geometric_grid(sol.r0(), 1e6 * sol.r0(), 256);
    for (double r : grid) {
      const auto k = kato_terms(sol, r);
      worst = std::max(worst, std::abs(k.relative));
    }
    out.reports.push_back(make_report(suite, "kato_equality", model, worst, 1e-12, grid.size()));
  }
  if (!sol.nonparabolic()) return out;

  out.reports.push_back(sharp_gradient_check(sol));
  const double residual = rigidity_residual(sol, 1.0, 0.5);
  if (detail::is_rigid_warp(m, sol.r0())) {
    out.reports.push_back(make_report(suite, "rigidity_residual", model, residual, 1e-10, 1, {{"residual", residual}}));
  } else {
    // Off the cone the residual must be strictly positive.
    out.reports.push_back(
        make_report(suite, "rigidity_residual", model, residual > 0.0 ? 0.0 : 1.0, 0.0, 1, {{"residual", residual}}));
  }
  return out;
}

inline TaskOutput monotone_psi_task(const PotentialSolution& sol, double beta, const ExperimentConfig& cfg) {
  const std::string suite = "monotone";
  const auto& m = sol.manifold();
  const std::string model = m.id();
  TaskOutput out;
  const std::map<std::string, double> tag{{"beta", beta}};

  const auto series = psi_series(sol, beta, cfg.s_grid.points());
  detail::add_rows(out, series, model);
  if (beta < beta_threshold(m.n()) - 1e-15) {
    out.reports.push_back(not_applicable(suite, "below_threshold", model, tag));
    return out;
  }

  const double scale = psi_beta(sol, beta, 0.0).value;
  const std::size_t count = series.samples.size();
  out.reports.push_back(make_report(suite, "monotonicity", model, monotonicity_violation(series, scale), 1e-9, count, tag));
  const auto spread = detail::derivative_spread(series, scale, true);
  out.reports.push_back(make_report(suite, "sign", model, spread.sign, 1e-10, count, tag));
  out.reports.push_back(make_report(suite, "derivative_fd", model, spread.fd, 1e-6, count, tag));
  out.reports.push_back(make_report(suite, "derivative_bulk", model, spread.bulk, 1e-4, count, tag));

  // Cylindrical end: Psi' and H vanish identically.
  const double r0 = sol.r0();
  if (m.df(r0) == 0.0 && warp_curvature_sup(m, r0) == 0.0) {
    double worst = 0.0;
    for (const auto& s : series.samples) {
      worst = std::max({worst, std::abs(s.d_surface), std::abs(s.d_bulk), std::abs(s.d_fd), std::abs(s.H)});
    }
    out.reports.push_back(make_report(suite, "rigidity", model, worst, 1e-12, count, tag));
  } else {
    out.reports.push_back(not_applicable(suite, "rigidity", model, tag));
  }
  return out;
}

inline TaskOutput monotone_spheroid_task(const SpheroidPotential& sp, const std::string& model, double beta,
                                         const ExperimentConfig& cfg) {
  const std::string suite = "monotone";
  TaskOutput out;
  const std::map<std::string, double> tag{{"beta", beta}};

  MonotoneSeries series;
  series.kind = SeriesKind::U;
  series.n = 3;
  series.beta = beta;
  for (double t : cfg.t_grid.points()) series.samples.push_back(sample_u(sp, beta, t));
  std::sort(series.samples.begin(), series.samples.end(),
            [](const MonotoneSample& a, const MonotoneSample& b) { return a.level < b.level; });
  detail::add_rows(out, series, model);
  if (beta < beta_threshold(3) - 1e-15) {
    out.reports.push_back(not_applicable(suite, "below_threshold", model, tag));
    return out;
  }

  const double scale = u_beta(sp, beta, 1.0).value;
  const std::size_t count = series.samples.size();
  out.reports.push_back(make_report(suite, "monotonicity", model, monotonicity_violation(series, scale), 1e-9, count, tag));
  const auto spread = detail::derivative_spread(series, scale, false);
  out.reports.push_back(make_report(suite, "sign", model, spread.sign, 1e-10, count, tag));
  out.reports.push_back(make_report(suite, "derivative_fd", model, spread.fd, 1e-6, count, tag));
  const auto lim = limit_t0(sp, beta);
  auto params = tag;
  params["extrapolated"] = lim.extrapolated;
  params["formula"] = lim.formula;
  out.reports.push_back(make_report(suite, "limit", model,
                                    std::abs(lim.extrapolated - lim.formula) / std::max(lim.formula, 1e-3 * scale),
                                    1e-2, 3, params));
  return out;
}

// ---------------------------------------------------------------------------
// willmore

inline std::vector<CheckReport> willmore_checks(const PotentialSolution& sol, const std::vector<double>& betas) {
  const std::string suite = "willmore";
  const auto& m = sol.manifold();
  const std::string model = m.id();
  const int n = m.n();
  std::vector<CheckReport> out;

  for (double factor : {1.0, 2.0, 10.0}) {
    const double r = factor * sol.r0();
    out.push_back(check_willmore(m, CoordinateSphere{&m, r}, "r=" + format_number(r)));
  }

  for (double beta : betas) {
    if (beta < beta_threshold(n) - 1e-15) continue;
    const auto k = kasue_bounds(sol, beta);
    const std::map<std::string, double> params{{"beta", beta},          {"bound", k.bound},
                                               {"sup_h", k.sup_h},       {"weight", k.weight},
                                               {"statement_level", k.statement_level}};
    const double lhs_scale = std::abs(k.bound * k.weight);
    out.push_back(make_report(suite, "kasue.identity", model,
                              k.identity_residual == 0.0 ? 0.0 : k.identity_residual / lhs_scale, 1e-10, 1, params));
    double bound_violation = std::max(0.0, k.bound - k.sup_h) / std::max(1.0, std::abs(k.sup_h));
    if (sol.nonparabolic() ? !(k.bound > 0.0) : !(k.bound >= 0.0)) bound_violation = 1.0;
    out.push_back(make_report(suite, "kasue.bound", model, bound_violation, 1e-10, 1, params));
    // Coordinate spheres have constant H, so the weighted mean is sup H.
    out.push_back(make_report(suite, "kasue.equality", model,
                              std::abs(k.bound - k.sup_h) / std::max(1.0, std::abs(k.sup_h)), 1e-10, 1, params));
  }

  const auto d = derived_constants(m);
  std::map<std::string, double> params{{"ale_infimum", d.ale_infimum}, {"avr", avr(m)}};
  if (d.iso_const) params["iso_const"] = *d.iso_const;
  if (d.sobolev_const) params["sobolev_const"] = *d.sobolev_const;
  const double ale_expected = avr(m) * sphere_area(n);
  out.push_back(make_report(suite, "derived_constants", model,
                            detail::rel_dev(d.ale_infimum, ale_expected, std::max(ale_expected, 1e-300)), 1e-12, 1,
                            params));
  return out;
}

inline std::vector<CheckReport> willmore_spheroid_checks(double a, double b, const std::string& model) {
  const std::string suite = "willmore";
  std::vector<CheckReport> out;
  const ModelManifold euclid(3, profiles::euclidean());
  out.push_back(check_willmore(euclid, spheroid_surface(a, b), "spheroid:a=" + format_number(a) +
                                                                   ":b=" + format_number(b)));

  // Energies toward the round sphere: strictly decreasing, above 4 pi, and
  // within 1e-3 of 4 pi at a/b = 1.01.
  std::map<std::string, double> params;
  const double four_pi = 4.0 * std::numbers::pi;
  double prev = std::numeric_limits<double>::infinity();
  bool ordered = true;
  double last = 0.0;
  for (double ratio : {2.0, 1.5, 1.1, 1.01}) {
    const double w = willmore_energy(spheroid_surface(ratio, 1.0), 3);
    params["energy_ratio_" + format_number(ratio)] = w;
    ordered = ordered && w < prev && w > four_pi;
    prev = w;
    last = w;
  }
  const double violation = ordered ? last - four_pi : std::numeric_limits<double>::infinity();
  out.push_back(make_report(suite, "spheroid_sequence", model, violation, 1e-3, 4, params));
  return out;
}

// ---------------------------------------------------------------------------
// mcf

inline TaskOutput mcf_trace_task(const ModelManifold& m, double rho0) {
  const std::string suite = "mcf";
  const std::string label = m.id() + ";rho0=" + format_number(rho0);
  TaskOutput out;
  const auto trace = flow_sphere(m, rho0);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out.traces.push_back({label, trace.times[i], trace.radius[i], trace.area[i], trace.volume[i], trace.iso_diff[i]});
  }

  const double a0 = trace.area.front();
  const double scale = a0 * std::sqrt(a0);
  const double d0 = trace.iso_diff.front();
  const std::map<std::string, double> tag{{"rho0", rho0}, {"C", trace.C}, {"D0", d0}};

  double rise = 0.0, lowest = 0.0, largest = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i > 0) rise = std::max(rise, trace.iso_diff[i] - trace.iso_diff[i - 1]);
    lowest = std::min(lowest, trace.iso_diff[i]);
    largest = std::max(largest, std::abs(trace.iso_diff[i]));
  }
  const bool d0_zero = std::abs(d0) <= 1e-10 * scale;
  out.reports.push_back(make_report(suite, "D_nonincreasing", label, rise, d0_zero ? 1e-8 : 1e-8 * d0, trace.size(), tag));
  out.reports.push_back(make_report(suite, "D_nonnegative", label, -lowest / scale, 1e-10, trace.size(), tag));

  const bool rigid = detail::is_rigid_warp(m, 1e-6 * rho0);
  if (rigid) {
    out.reports.push_back(make_report(suite, "D_zero", label, largest / scale, 1e-10, trace.size(), tag));
  } else {
    out.reports.push_back(not_applicable(suite, "D_zero", label, tag));
  }

  auto params = tag;
  params["extinction_time"] = trace.extinction_time.value_or(std::numeric_limits<double>::quiet_NaN());
  if (!trace.extinction_time) {
    out.reports.push_back(
        make_report(suite, "extinction", label, std::numeric_limits<double>::infinity(), 1e-6, trace.size(), params));
  } else if (rigid) {
    // rho^2 = rho0^2 - 4t exactly.
    const double v = std::abs(*trace.extinction_time / (rho0 * rho0) - 0.25);
    out.reports.push_back(make_report(suite, "extinction", label, v, 1e-6, trace.size(), params));
  } else {
    out.reports.push_back(make_report(suite, "extinction", label, 0.0, 1e-6, trace.size(), params));
  }

  out.reports.push_back(huisken_derivative_check(trace, m));
  out.reports.back().model = label;
  return out;
}

inline std::vector<CheckReport> iso_ratio_checks(const ModelManifold& m) {
  const std::string suite = "mcf", model = m.id();
  std::vector<CheckReport> out;
  const double ratio_avr = avr(m);
  const double rho_far = 1e4 * std::max(1.0, m.warp().tail_radius);
  const auto grid = capmono::detail::geometric_grid(1e-4, rho_far, 128);
  const bool rigid = detail::is_rigid_warp(m, 1e-4);
  double worst = 0.0;
  for (double rho : grid) {
    const double q = iso_ratio(m, rho);
    worst = std::max(worst, rigid ? std::abs(q - ratio_avr) : std::max(0.0, ratio_avr - q));
  }
  out.push_back(make_report(suite, "iso_ratio", model, worst, 1e-10, grid.size(), {{"avr", ratio_avr}}));

  const double far = iso_ratio(m, rho_far);
  double limit_violation = std::abs(far - ratio_avr);
  std::map<std::string, double> params{{"ratio_far", far}, {"avr", ratio_avr}};
  if (m.warp().smooth_origin && m.omega_factor() == 1.0) {
    const double near = iso_ratio(m, 1e-4);
    params["ratio_near"] = near;
    limit_violation = std::max(limit_violation, std::abs(near - 1.0));
  }
  out.push_back(make_report(suite, "iso_ratio.limits", model, limit_violation, 1e-3, 2, params));
  return out;
}

// ---------------------------------------------------------------------------
// assembly

inline std::vector<double> betas_for(const ExperimentConfig& cfg, int n) {
  if (!cfg.betas.empty()) {
    auto b = cfg.betas;
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }
  return default_betas(n);
}

/// Tasks of one model in a fixed order: geometry, potential, monotone,
/// willmore, mcf.
inline void append_model_tasks(std::vector<Task>& tasks, const BuiltModel& built, const ExperimentConfig& cfg) {
  auto enabled = [&](const char* s) { return cfg.suites.count(s) > 0; };
  const std::string model = built.id;

  if (built.is_spheroid()) {
    const auto sp = *built.spheroid;
    if (enabled("monotone")) {
      for (double beta : betas_for(cfg, 3)) {
        tasks.push_back({"monotone", model, [sp, model, beta, &cfg] { return monotone_spheroid_task(sp, model, beta, cfg); }});
      }
    }
    if (enabled("willmore")) {
      tasks.push_back({"willmore", model, [sp, model] {
                         TaskOutput out;
                         out.reports = willmore_spheroid_checks(sp.a, sp.b, model);
                         return out;
                       }});
    }
    return;
  }

  const auto manifold = built.manifold;
  const double r0 = cfg.r0;
  // Built lazily inside the tasks so classification errors surface as reports.
  auto solution = [manifold, r0] { return solve_exterior(manifold, r0); };
  const auto betas = betas_for(cfg, manifold->n());

  if (enabled("geometry")) {
    tasks.push_back({"geometry", model, [manifold, r0] {
                       TaskOutput out;
                       out.reports = geometry_checks(*manifold, r0);
                       return out;
                     }});
  }
  if (enabled("potential")) {
    tasks.push_back({"potential", model, [solution] {
                       TaskOutput out;
                       out.reports = potential_checks(solution());
                       return out;
                     }});
  }
  if (enabled("monotone")) {
    // One shared solution per model so level radii are reused across beta.
    auto shared = std::make_shared<std::optional<PotentialSolution>>();
    auto once = std::make_shared<std::once_flag>();
    auto get = [shared, once, solution]() -> const PotentialSolution& {
      std::call_once(*once, [&] { shared->emplace(solution()); });
      return **shared;
    };
    tasks.push_back({"monotone", model, [get] { return monotone_model_task(get()); }});
    for (double beta : betas) {
      tasks.push_back({"monotone", model, [get, beta, &cfg] {
                         const auto& sol = get();
                         return sol.nonparabolic() ? monotone_u_task(sol, beta, cfg) : monotone_psi_task(sol, beta, cfg);
                       }});
    }
  }
  if (enabled("willmore")) {
    tasks.push_back({"willmore", model, [solution, betas] {
                       TaskOutput out;
                       out.reports = willmore_checks(solution(), betas);
                       return out;
                     }});
  }
  if (enabled("mcf") && manifold->n() == 3 && manifold->warp().origin_closed) {
    tasks.push_back({"mcf", model, [manifold] {
                       TaskOutput out;
                       out.reports = iso_ratio_checks(*manifold);
                       return out;
                     }});
    for (double rho0 : cfg.mcf_rho0) {
      tasks.push_back({"mcf", model, [manifold, rho0] { return mcf_trace_task(*manifold, rho0); }});
    }
  }
}

inline std::vector<Task> build_tasks(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < cfg.models.size(); ++i) {
    append_model_tasks(tasks, build_model(cfg.models[i], i, cfg.r0), cfg);
  }
  return tasks;
}

/// Runs one task, turning a numerical error into a failing report.
inline TaskOutput run_task(const Task& task) {
  try {
    return task.body();
  } catch (const Error& e) {
    TaskOutput out;
    auto r = make_report(task.suite, "error." + std::string(to_string(e.kind())), task.model,
                         std::numeric_limits<double>::infinity(), 0.0, 0);
    out.reports.push_back(std::move(r));
    return out;
  } catch (const std::exception&) {
    TaskOutput out;
    out.reports.push_back(make_report(task.suite, "error.exception", task.model,
                                      std::numeric_limits<double>::infinity(), 0.0, 0));
    return out;
  }
}

/// Worker count: CAPMONO_JOBS, then the requested value, then the hardware.
inline int resolve_workers(int requested) {
  if (const char* env = std::getenv("CAPMONO_JOBS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) throw ConfigError("CAPMONO_JOBS", "expected a positive integer");
    return static_cast<int>(v);
  }
  if (requested > 0) return requested;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

inline RunResult execute(const std::vector<Task>& tasks, int workers) {
  std::vector<TaskOutput> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = run_task(tasks[i]);
  };
  const int count = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < count; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunResult run;
  for (auto& r : results) {
    std::move(r.reports.begin(), r.reports.end(), std::back_inserter(run.reports));
    std::move(r.rows.begin(), r.rows.end(), std::back_inserter(run.rows));
    std::move(r.traces.begin(), r.traces.end(), std::back_inserter(run.traces));
  }
  return run;
}

inline void apply_tolerances(std::vector<CheckReport>& reports, const std::map<std::string, double>& overrides) {
  for (auto& r : reports) {
    auto it = overrides.find(r.suite + "." + r.check);
    if (it == overrides.end() || r.status == CheckStatus::NotApplicable) continue;
    const bool equality = r.status == CheckStatus::Equality;
    r.tolerance = it->second;
    r.status = CheckStatus::Pass;
    r.settle(equality);
  }
}

inline RunResult run_experiment(const ExperimentConfig& cfg, int workers) {
  auto run = execute(build_tasks(cfg), workers);
  apply_tolerances(run.reports, cfg.tolerances);
  return run;
}

// ---------------------------------------------------------------------------
// output

inline nlohmann::ordered_json to_json(const CheckReport& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["check"] = r.check;
  j["model"] = r.model;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = std::move(params);
  j["status"] = std::string(to_string(r.status));
  j["max_violation"] = r.max_violation;
  j["tolerance"] = r.tolerance;
  j["samples"] = r.samples;
  return j;
}

inline std::string checks_json(const std::vector<CheckReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

inline std::string monotone_csv(const std::vector<MonotoneRow>& rows) {
  std::string out = "model,n,beta,kind,level,r_level,value,d_surface,d_bulk,d_fd,H,grad_conf\n";
  for (const auto& r : rows) {
    const auto& s = r.sample;
    out += r.model + "," + std::to_string(r.n) + "," + format_number(s.beta) + "," + r.kind;
    for (double x : {s.level, s.r_level, s.value, s.d_surface, s.d_bulk, s.d_fd, s.H, s.grad_conf}) {
      out += "," + format_number(x);
    }
    out += "\n";
  }
  return out;
}

inline std::string traces_csv(const std::vector<TraceRow>& rows) {
  std::string out = "model,t,rho,area,volume,D\n";
  for (const auto& r : rows) {
    out += r.model;
    for (double x : {r.t, r.rho, r.area, r.volume, r.D}) out += "," + format_number(x);
    out += "\n";
  }
  return out;
}

namespace detail {

inline std::string pad(std::string s, std::size_t width) {
  s.resize(std::max(width, s.size() + 1), ' ');
  return s;
}

}  // namespace detail

/// Status counts per suite followed by the failing checks.
inline std::string summary_counts(const std::vector<CheckReport>& reports) {
  using detail::pad;
  std::map<std::string, std::map<CheckStatus, int>> counts;
  for (const auto& r : reports) ++counts[r.suite][r.status];
  std::ostringstream out;
  out << pad("suite", 12) << pad("PASS", 8) << pad("EQUALITY", 10) << pad("N/A", 8) << "FAIL\n";
  int failures = 0;
  for (const auto& suite : all_suites()) {
    auto it = counts.find(suite);
    if (it == counts.end()) continue;
    auto c = it->second;
    failures += c[CheckStatus::Fail];
    out << pad(suite, 12) << pad(std::to_string(c[CheckStatus::Pass]), 8)
        << pad(std::to_string(c[CheckStatus::Equality]), 10) << pad(std::to_string(c[CheckStatus::NotApplicable]), 8)
        << c[CheckStatus::Fail] << "\n";
  }
  out << "\n" << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << "\n";
  if (failures > 0) {
    out << "\nfailures:\n";
    for (const auto& r : reports) {
      if (!r.failed()) continue;
      out << "  " << r.suite << "." << r.check << "  " << r.model << "  violation " << format_number(r.max_violation)
          << " > tolerance " << format_number(r.tolerance) << "\n";
    }
  }
  return out.str();
}

/// summary_counts plus one line per report.
inline std::string summary_text(const std::vector<CheckReport>& reports) {
  using detail::pad;
  std::ostringstream out;
  out << summary_counts(reports);
  out << "\n" << pad("status", 16) << pad("suite.check", 28) << pad("max_violation", 24) << pad("tolerance", 12)
      << "model\n";
  for (const auto& r : reports) {
    out << pad(std::string(to_string(r.status)), 16) << pad(r.suite + "." + r.check, 28)
        << pad(format_number(r.max_violation), 24) << pad(format_number(r.tolerance), 12) << r.model;
    if (auto b = r.params.find("beta"); b != r.params.end()) out << "  beta=" << format_number(b->second);
    out << "\n";
  }
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline void write_outputs(const std::filesystem::path& dir, const RunResult& run) {
  std::filesystem::create_directories(dir);
  write_file(dir / "monotone.csv", monotone_csv(run.rows));
  write_file(dir / "checks.json", checks_json(run.reports));
  write_file(dir / "mcf_traces.csv", traces_csv(run.traces));
  write_file(dir / "summary.txt", summary_text(run.reports));
}

/// Exit status: 0 when nothing failed, 1 otherwise.
inline int exit_status(const RunResult& run) { return run.any_failed() ? 1 : 0; }

}  // namespace capmono::cli

#endif  // CAPMONO_RUNNER_HPP
