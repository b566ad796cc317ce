#ifndef CAPMONO_MCF_HPP
#define CAPMONO_MCF_HPP

// Mean curvature flow of coordinate spheres in three-dimensional models and
// the isoperimetric difference D(t) = A^{3/2} - C V along it.
//
// A coordinate sphere {rho} moves with speed H = 2 f'(rho)/f(rho). The flow
// is integrated in w = rho^2, dw/dt = -4 rho f'/f, which tends to -4 at the
// pole of an origin-closed warp and is exactly -4 on cones.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "capmono/error.hpp"
#include "capmono/geometry.hpp"
#include "capmono/numerics.hpp"
#include "capmono/report.hpp"

namespace capmono {

struct FlowTrace {
  std::string model;
  double rho0 = 0.0;
  std::vector<double> times;
  std::vector<double> radius;
  std::vector<double> area;
  std::vector<double> volume;
  std::vector<double> iso_diff;
  double C = 0.0;
  std::optional<double> extinction_time;
  bool underflow = false;

  std::size_t size() const { return times.size(); }
};

namespace detail {

inline void require_flow_model(const ModelManifold& m) {
  if (m.n() != 3) throw Error(ErrorKind::NotThreeDimensional, "coordinate-sphere MCF is implemented for n = 3");
  if (!m.warp().origin_closed) throw Error(ErrorKind::DomainError, m.warp().family + " is not origin-closed");
}

// rho f'/f with the pole limit 1 for origin-closed warps.
inline double radial_log_slope(const ModelManifold& m, double rho) {
  if (!(rho > 0.0)) return 1.0;
  return rho * m.df(rho) / m.f(rho);
}

}  // namespace detail

/// sqrt(36 pi AVR), the isoperimetric constant used for D(t).
inline double isoperimetric_flow_constant(const ModelManifold& m) {
  return std::sqrt(36.0 * std::numbers::pi * avr(m));
}

/// |dB(rho)|^3 / (36 pi |B(rho)|^2).
inline double iso_ratio(const ModelManifold& m, double rho) {
  detail::require_flow_model(m);
  const double a = m.sphere_area_at(rho);
  const double v = ball_volume(m, rho);
  return a * a * a / (36.0 * std::numbers::pi * v * v);
}

/// Flows the coordinate sphere {rho0} until rho <= 1e-6 rho0 (or the time
/// resolution runs out). Steps are capped so w and f' change by at most 0.5%
/// per step, which keeps the samples dense all the way to extinction.
inline FlowTrace flow_sphere(const ModelManifold& m, double rho0, std::optional<double> c_override = std::nullopt) {
  detail::require_flow_model(m);
  if (!(rho0 > 0.0)) throw Error(ErrorKind::DomainError, "initial radius must be positive");

  FlowTrace trace;
  trace.model = m.id();
  trace.rho0 = rho0;
  trace.C = c_override.value_or(isoperimetric_flow_constant(m));

  using numerics::State;
  auto rhs = [&m](double, const State<1>& y) -> State<1> {
    const double rho = std::sqrt(std::max(y[0], 0.0));
    return {-4.0 * detail::radial_log_slope(m, rho)};
  };
  // Stop radius grows with t once steps of 0.5% in w approach the time
  // resolution (slow flows far out on flat warps).
  const double w_floor = 1e-12 * rho0 * rho0;
  numerics::OdeSpec<1> spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-14 * rho0 * rho0;
  spec.stop_predicate = [w_floor](double t, const State<1>& y) {
    return y[0] - std::max(w_floor, 1e5 * std::numeric_limits<double>::epsilon() * std::abs(t));
  };
  spec.step_cap = [&m](double, const State<1>& y) {
    const double rho = std::sqrt(std::max(y[0], 0.0));
    double cap = 0.005 * y[0] / (4.0 * detail::radial_log_slope(m, rho));
    // Also keep f' within 0.5% per step: rho moves by H h = 2 (f'/f) h.
    const double f = m.f(rho), fp = m.df(rho), fpp = m.d2f(rho);
    if (rho > 0.0 && fp > 0.0 && fpp != 0.0) cap = std::min(cap, 0.005 * (fp / std::abs(fpp)) * f / (2.0 * fp));
    return cap;
  };
  spec.initial_step = 1e-6 * rho0 * rho0;
  const auto traj = numerics::ode_solve<1>(rhs, State<1>{rho0 * rho0}, 0.0, spec);

  const double c = trace.C;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double rho = std::sqrt(std::max(traj.y[i][0], 0.0));
    const double a = m.sphere_area_at(rho);
    const double v = ball_volume(m, rho);
    trace.times.push_back(traj.t[i]);
    trace.radius.push_back(rho);
    trace.area.push_back(a);
    trace.volume.push_back(v);
    trace.iso_diff.push_back(a * std::sqrt(a) - c * v);
  }
  if (traj.status == numerics::OdeStatus::Event) {
    // The remaining w collapses at rate ~4 near the pole.
    const double w = traj.y.back()[0];
    trace.extinction_time = *traj.event_time + w / (4.0 * detail::radial_log_slope(m, std::sqrt(w)));
  } else {
    trace.underflow = true;
  }
  return trace;
}

/// Compares a finite-difference dD/dt along the trace with
///   -(3/2) A^{1/2} int H^2 + C int H,
/// int H^2 = 4 omega f'^2, int H = 2 omega f f'. Samples below 1e-3 rho0 are
/// skipped (D and its derivative degenerate there). Mismatch is relative to
/// the sum of the magnitudes of the two terms.
inline CheckReport huisken_derivative_check(const FlowTrace& trace, const ModelManifold& m, double tolerance = 1e-4) {
  if (trace.size() < 200) {
    throw Error(ErrorKind::InsufficientSamples, "trace has " + std::to_string(trace.size()) + " samples, need 200");
  }
  const double omega = m.omega();
  double worst = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    const double rho = trace.radius[i];
    if (rho < 1e-3 * trace.rho0) continue;
    const double h1 = trace.times[i] - trace.times[i - 1];
    const double h2 = trace.times[i + 1] - trace.times[i];
    if (!(h1 > 0.0 && h2 > 0.0)) continue;
    // Second-order derivative on a nonuniform stencil.
    const double fd = (-h2 / (h1 * (h1 + h2))) * trace.iso_diff[i - 1] +
                      ((h2 - h1) / (h1 * h2)) * trace.iso_diff[i] +
                      (h1 / (h2 * (h1 + h2))) * trace.iso_diff[i + 1];
    const double f = m.f(rho), fp = m.df(rho);
    const double term_h2 = 1.5 * std::sqrt(trace.area[i]) * 4.0 * omega * fp * fp;
    const double term_h = trace.C * 2.0 * omega * f * fp;
    const double closed = -term_h2 + term_h;
    const double scale = std::abs(term_h2) + std::abs(term_h);
    if (scale > 0.0) worst = std::max(worst, std::abs(fd - closed) / scale);
    ++used;
  }
  return make_report("mcf", "huisken_derivative", trace.model, worst, tolerance, used, {{"rho0", trace.rho0}});
}

}  // namespace capmono

#endif  // CAPMONO_MCF_HPP
