#ifndef CAPMONO_MONOTONE_HPP
#define CAPMONO_MONOTONE_HPP

// Level-set monotone quantities of exterior potentials.
//
//   U_beta(t)   = t^{-beta (n-1)/(n-2)} int_{u=t} |Du|^{beta+1}        t in (0, 1]
//   Phi_beta(s) = int_{phi=s} |grad phi|^{beta+1} in g~ = u^{2/(n-2)} g, phi = -log u
//   Psi_beta(s) = int_{psi=s} |D psi|^{beta+1}                         (parabolic)
//   A_beta(r)   = r^{-(n-1)} int_{b=r} |Db|^{beta+1},  b = u^{-1/(n-2)}
//
// Each derivative is produced three ways: the level-set (surface) formula,
// the sub-level (bulk) formula, and a Richardson finite difference of the
// value itself. On the radial models the bulk integrand uses the closed forms
// |DDu|^2 = u''^2 + (n-1)(f'u'/f)^2, |D|Du||^2 = u''^2, D^T|Du| = 0 and
// Ric(Du, Du) = -(n-1)(f''/f) u'^2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "capmono/error.hpp"
#include "capmono/geometry.hpp"
#include "capmono/numerics.hpp"
#include "capmono/potential.hpp"
#include "capmono/report.hpp"

namespace capmono {

enum class SeriesKind { U, Phi, Psi, A };

inline std::string_view to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::U: return "U";
    case SeriesKind::Phi: return "Phi";
    case SeriesKind::Psi: return "Psi";
    case SeriesKind::A: return "A";
  }
  return "U";
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MonotoneSample {
  double beta = kNaN;
  double level = kNaN;    // t for U, s for Phi/Psi, r for A
  double r_level = kNaN;  // radius of the level set (semi-major axis for spheroids)
  double value = kNaN;
  double d_surface = kNaN;
  double d_bulk = kNaN;
  double d_fd = kNaN;
  double H = kNaN;          // mean curvature of the level set
  double grad_conf = kNaN;  // |grad phi| in g~ = |Du| / u^{(n-1)/(n-2)}
  double H_conf = kNaN;     // mean curvature in g~
};

struct MonotoneDerivatives {
  double surface = kNaN;
  double bulk = kNaN;
  double fd = kNaN;
};

struct MonotoneSeries {
  SeriesKind kind = SeriesKind::U;
  std::string model;
  int n = 0;
  double beta = kNaN;
  std::vector<MonotoneSample> samples;
  double limit_value = kNaN;
  double limit_formula = kNaN;
};

/// The smallest beta covered by the monotonicity theorems.
inline double beta_threshold(int n) { return static_cast<double>(n - 2) / (n - 1); }

namespace detail {

inline double conformal_exponent(int n) { return static_cast<double>(n - 1) / (n - 2); }

inline void require_nonparabolic(const PotentialSolution& sol, const char* op) {
  if (!sol.nonparabolic()) throw Error(ErrorKind::NotApplicable, std::string(op) + " needs a nonparabolic potential");
}

inline void require_parabolic(const PotentialSolution& sol, const char* op) {
  if (sol.nonparabolic()) throw Error(ErrorKind::NotApplicable, std::string(op) + " needs a parabolic potential");
}

// H - ((n-1)/(n-2)) |D log u| on {r} in the cancellation-free form
// (n-1)(f'/f) K/(1+K).
inline double log_bracket(const PotentialSolution& sol, double r, double defect) {
  const auto& m = sol.manifold();
  return (m.n() - 1) * m.df(r) / m.f(r) * defect / (1.0 + defect);
}

// Power-law decay exponent of the U bulk integrand: with f^{1-n} ~ r^{-P}
// and curvature terms ~ r^{-2}, the integrand decays like
// r^{-(P + beta (c - P (c - 1)))}, c = (n-1)/(n-2).
inline double u_bulk_decay(const PotentialSolution& sol, double beta) {
  const double p = sol.tail_exponent();
  const double c = conformal_exponent(sol.n());
  return std::max(p + beta * (c - p * (c - 1.0)), p);
}

inline double psi_bulk_decay(const PotentialSolution& sol, double beta) {
  return std::max(2.0 + sol.tail_exponent() * (beta - 1.0), 1.5);
}

// U_beta(t) without the t <= 1 restriction; finite differences at t = 1 step
// across the boundary into the region r < r0 where the warp allows it.
inline double u_beta_value(const PotentialSolution& sol, double beta, double t) {
  const auto& m = sol.manifold();
  const double r = sol.level_radius(t);
  const double c = conformal_exponent(m.n());
  return std::pow(t, -beta * c) * std::pow(sol.grad_mag(r), beta + 1.0) * m.sphere_area_at(r);
}

inline double psi_beta_value(const PotentialSolution& sol, double beta, double s) {
  const double r = sol.level_radius(s);
  return std::pow(sol.grad_mag(r), beta + 1.0) * sol.manifold().sphere_area_at(r);
}

// Central difference, falling back to a one-sided stencil when the level
// cannot be continued past a domain edge.
template <class F>
double level_derivative(F&& fn, double x, double h0, int edge_direction) {
  try {
    return numerics::central_diff(fn, x, h0).value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::RootNotBracketed && e.kind() != ErrorKind::DomainError) throw;
    return numerics::one_sided_diff(fn, x, h0, edge_direction).value;
  }
}

inline double spheroid_u_beta_value(const SpheroidPotential& sp, double beta, double t) {
  const double xi = t == 1.0 ? sp.level_coordinate(1.0)
                             : (sp.is_sphere() ? sp.a / t : 1.0 / std::tanh(t * sp.q0));
  const double integral = sp.surface_integral(xi, [beta](double g, double) { return std::pow(g, beta + 1.0); });
  return std::pow(t, -2.0 * beta) * integral;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// U_beta.

/// Value and level-set geometry of U_beta at level t (derivative fields NaN).
inline MonotoneSample u_beta(const PotentialSolution& sol, double beta, double t) {
  detail::require_nonparabolic(sol, "u_beta");
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorKind::RootNotBracketed, "U_beta level t must lie in (0, 1]");
  const auto& m = sol.manifold();
  const int n = m.n();
  const double c = detail::conformal_exponent(n);
  const double r = sol.level_radius(t);
  const double g = sol.grad_mag(r);

  MonotoneSample s;
  s.beta = beta;
  s.level = t;
  s.r_level = r;
  s.value = std::pow(t, -beta * c) * std::pow(g, beta + 1.0) * m.sphere_area_at(r);
  s.H = m.mean_curvature(r);
  s.grad_conf = g / std::pow(t, c);
  s.H_conf = std::pow(t, -1.0 / (n - 2)) * detail::log_bracket(sol, r, sol.cone_defect(r));
  return s;
}

/// Prolate-spheroid U_beta (n = 3). H and grad_conf are area averages over
/// the level spheroid; r_level is its semi-major axis.
inline MonotoneSample u_beta(const SpheroidPotential& sp, double beta, double t) {
  const double xi = sp.level_coordinate(t);
  MonotoneSample s;
  s.beta = beta;
  s.level = t;
  s.r_level = sp.is_sphere() ? xi : sp.c * xi;
  s.value = detail::spheroid_u_beta_value(sp, beta, t);
  const double area = sp.surface_integral(xi, [](double, double) { return 1.0; });
  s.H = sp.surface_integral(xi, [](double, double h) { return h; }) / area;
  s.grad_conf = sp.surface_integral(xi, [t](double g, double) { return g / (t * t); }) / area;
  numerics::QuadSpec spec;
  spec.abs_tol = 1e-12 * 2.0 * s.grad_conf * area;
  s.H_conf = sp.surface_integral(xi, [t](double g, double h) { return (h - 2.0 * g / t) / t; }, spec) / area;
  return s;
}

/// dU_beta/dt by the surface formula, the bulk formula and finite differences.
inline MonotoneDerivatives du_beta(const PotentialSolution& sol, double beta, double t) {
  detail::require_nonparabolic(sol, "du_beta");
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorKind::RootNotBracketed, "U_beta level t must lie in (0, 1]");
  const auto& m = sol.manifold();
  const int n = m.n();
  const double c = detail::conformal_exponent(n);
  const double r_t = sol.level_radius(t);

  MonotoneDerivatives d;
  {
    const double g = sol.grad_mag(r_t);
    d.surface = beta * std::pow(t, -beta * c) * std::pow(g, beta) * m.sphere_area_at(r_t) *
                detail::log_bracket(sol, r_t, sol.cone_defect(r_t));
  }

  {
    const double i0 = sol.boundary_tail();
    const double kato_weight = beta - beta_threshold(n);
    auto integrand = [&](double r) {
      const double f = m.f(r), fp = m.df(r), fpp = m.d2f(r);
      const double defect = sol.cone_defect(r);
      const double tail = std::pow(f, 2 - n) / ((n - 2) * fp) * (1.0 + defect);
      const double u = tail / i0;
      const double g = std::pow(f, 1 - n) / i0;
      const double du = -g;
      const double tangential = fp * du / f;
      const double ddu = -(n - 1) * tangential;
      const double ric = -(n - 1) * fpp / f * g * g;
      // |DDu|^2 - (n/(n-1)) u''^2 with |DDu|^2 = u''^2 + (n-1) tangential^2, factored.
      const double kato = ((n - 1) * tangential - ddu) * ((n - 1) * tangential + ddu) / (n - 1);
      const double bracket = (n - 1) * fp / f * defect / (1.0 + defect);
      const double curly = ric + kato + kato_weight * g * g * bracket * bracket;
      return std::pow(u, 2.0 - beta * c) * std::pow(g, beta - 2.0) * curly * m.sphere_area_at(r);
    };
    d.bulk = beta / (t * t) * numerics::integrate_improper(integrand, r_t, detail::u_bulk_decay(sol, beta));
  }

  d.fd = detail::level_derivative([&](double x) { return detail::u_beta_value(sol, beta, x); }, t, 1e-2 * t, -1);
  return d;
}

struct KatoTerms {
  double hessian_sq;  // |DDu|^2
  double defect;      // |DDu|^2 - (n/(n-1)) |D|Du||^2
  double relative;    // defect / |DDu|^2, 0 when both vanish
};

/// Refined Kato terms of the radial potential at r, from the closed forms
/// u'' = -(n-1)(f'/f)u' and tangential Hessian eigenvalue (f'/f)u'.
inline KatoTerms kato_terms(const PotentialSolution& sol, double r) {
  const auto& m = sol.manifold();
  const int n = m.n();
  const double du = sol.nonparabolic() ? -sol.grad_mag(r) : sol.grad_mag(r);
  const double tangential = m.df(r) / m.f(r) * du;
  const double ddu = sol.second_derivative(r);
  // Squares in long double: far out on exponentially flattening warps they
  // fall below the normal double range.
  const long double d2 = static_cast<long double>(ddu) * ddu;
  const long double hess2 = d2 + (n - 1) * static_cast<long double>(tangential) * tangential;
  const long double defect = hess2 - (static_cast<long double>(n) / (n - 1)) * d2;
  const double relative = defect == 0.0L ? 0.0 : static_cast<double>(defect / hess2);
  return {static_cast<double>(hess2), static_cast<double>(defect), relative};
}

/// Spheroid derivatives: surface formula and finite differences. The bulk
/// formula needs the radial closed forms and is NaN here.
inline MonotoneDerivatives du_beta(const SpheroidPotential& sp, double beta, double t) {
  const double xi = sp.level_coordinate(t);
  MonotoneDerivatives d;
  // H and 2|Du|/t nearly cancel for small t; the quadrature error is judged
  // against the size of the 2|Du|/t term alone.
  numerics::QuadSpec spec;
  spec.abs_tol = 1e-12 * (2.0 / t) * sp.surface_integral(xi, [beta](double g, double) { return std::pow(g, beta + 1.0); });
  d.surface = beta * std::pow(t, -2.0 * beta) *
              sp.surface_integral(xi, [beta, t](double g, double h) { return std::pow(g, beta) * (h - 2.0 * g / t); }, spec);
  d.fd = numerics::central_diff([&](double x) { return detail::spheroid_u_beta_value(sp, beta, x); }, t, 1e-2 * t).value;
  return d;
}

/// u_beta and du_beta combined into one sample.
inline MonotoneSample sample_u(const PotentialSolution& sol, double beta, double t) {
  MonotoneSample s = u_beta(sol, beta, t);
  const auto d = du_beta(sol, beta, t);
  s.d_surface = d.surface;
  s.d_bulk = d.bulk;
  s.d_fd = d.fd;
  return s;
}

inline MonotoneSample sample_u(const SpheroidPotential& sp, double beta, double t) {
  MonotoneSample s = u_beta(sp, beta, t);
  const auto d = du_beta(sp, beta, t);
  s.d_surface = d.surface;
  s.d_bulk = d.bulk;
  s.d_fd = d.fd;
  return s;
}

// ---------------------------------------------------------------------------
// Phi_beta: conformal side.

/// Phi_beta(s) evaluated from the conformal quantities |grad phi|_g~ and
/// dsigma_g~ = u^{(n-1)/(n-2)} dsigma. d_surface holds -t U'(t) at t = e^{-s}.
inline MonotoneSample phi_beta(const PotentialSolution& sol, double beta, double s) {
  detail::require_nonparabolic(sol, "phi_beta");
  if (!(s >= 0.0)) throw Error(ErrorKind::RootNotBracketed, "Phi_beta level s must be >= 0");
  const auto& m = sol.manifold();
  const int n = m.n();
  const double c = detail::conformal_exponent(n);
  const double u = std::exp(-s);
  const double r = sol.level_radius(u);
  const double conf_grad = sol.grad_mag(r) / std::pow(u, c);
  const double conf_area = std::pow(u, c) * m.sphere_area_at(r);

  MonotoneSample out;
  out.beta = beta;
  out.level = s;
  out.r_level = r;
  out.value = std::pow(conf_grad, beta + 1.0) * conf_area;
  out.grad_conf = conf_grad;
  out.H = m.mean_curvature(r);
  const double bracket = detail::log_bracket(sol, r, sol.cone_defect(r));
  out.H_conf = std::pow(u, -1.0 / (n - 2)) * bracket;
  // -t U'(t) = -beta int |grad phi|^beta H_g~ dsigma_g~.
  out.d_surface = -beta * std::pow(conf_grad, beta) * out.H_conf * conf_area;
  return out;
}

// ---------------------------------------------------------------------------
// Psi_beta: parabolic side.

inline MonotoneSample psi_beta(const PotentialSolution& sol, double beta, double s) {
  detail::require_parabolic(sol, "psi_beta");
  if (!(s >= 0.0)) throw Error(ErrorKind::RootNotBracketed, "Psi_beta level s must be >= 0");
  const auto& m = sol.manifold();
  const double r = sol.level_radius(s);
  const double g = sol.grad_mag(r);
  MonotoneSample out;
  out.beta = beta;
  out.level = s;
  out.r_level = r;
  out.value = std::pow(g, beta + 1.0) * m.sphere_area_at(r);
  out.H = m.mean_curvature(r);
  return out;
}

inline MonotoneDerivatives dpsi_beta(const PotentialSolution& sol, double beta, double s) {
  detail::require_parabolic(sol, "dpsi_beta");
  if (!(s >= 0.0)) throw Error(ErrorKind::RootNotBracketed, "Psi_beta level s must be >= 0");
  const auto& m = sol.manifold();
  const int n = m.n();
  const double r_s = sol.level_radius(s);

  MonotoneDerivatives d;
  d.surface = -beta * std::pow(sol.grad_mag(r_s), beta) * m.mean_curvature(r_s) * m.sphere_area_at(r_s);

  auto integrand = [&](double r) {
    const double f = m.f(r), fp = m.df(r), fpp = m.d2f(r);
    const double g = std::pow(f, 1 - n);
    const double ddpsi = -(n - 1) * fp / f * g;
    const double ric = -(n - 1) * fpp / f * g * g;
    const double hess2 = ddpsi * ddpsi + (n - 1) * (fp * g / f) * (fp * g / f);
    const double curly = ric + hess2 + (beta - 2.0) * ddpsi * ddpsi;
    return std::pow(g, beta - 2.0) * curly * m.sphere_area_at(r);
  };
  d.bulk = -beta * numerics::integrate_improper(integrand, r_s, detail::psi_bulk_decay(sol, beta));

  d.fd = detail::level_derivative([&](double x) { return detail::psi_beta_value(sol, beta, x); }, s,
                                  numerics::default_step(s), +1);
  return d;
}

inline MonotoneSample sample_psi(const PotentialSolution& sol, double beta, double s) {
  MonotoneSample out = psi_beta(sol, beta, s);
  const auto d = dpsi_beta(sol, beta, s);
  out.d_surface = d.surface;
  out.d_bulk = d.bulk;
  out.d_fd = d.fd;
  return out;
}

// ---------------------------------------------------------------------------
// Limits and rigidity.

namespace detail {

// Aitken delta-squared on three values at t = 1e-2, 1e-3, 1e-4; returns the
// last value when the differences do not contract geometrically.
inline double aitken(double u1, double u2, double u3) {
  const double d1 = u2 - u1, d2 = u3 - u2;
  const bool contracting = d1 != 0.0 && (d1 > 0.0) == (d2 > 0.0) && std::abs(d2) < std::abs(d1);
  if (contracting && std::abs(d2) > 1e-14 * std::abs(u3)) return u3 - d2 * d2 / (d2 - d1);
  return u3;
}

}  // namespace detail

struct LimitEstimate {
  double extrapolated;
  double formula;
};

/// Closed-form t -> 0+ limit of U_beta,
///   Cap^{1 - beta/(n-2)} AVR^{beta/(n-2)} (n-2)^{beta+1} |S^{n-1}|,
/// which vanishes when AVR = 0.
inline double u_beta_limit_formula(const PotentialSolution& sol, double beta) {
  detail::require_nonparabolic(sol, "limit");
  const int n = sol.n();
  const double ratio = avr(sol.manifold());
  if (!(ratio > 0.0)) return 0.0;
  return std::pow(sol.capacity(), 1.0 - beta / (n - 2)) * std::pow(ratio, beta / (n - 2)) *
         std::pow(n - 2.0, beta + 1.0) * sphere_area(n);
}

/// Extrapolates U_beta from t in {1e-2, 1e-3, 1e-4}, assuming
/// U(t) = L + K t^p across the three decades (Aitken's delta-squared). Falls
/// back to U(1e-4) when the differences do not contract geometrically.
inline LimitEstimate limit_t0(const PotentialSolution& sol, double beta) {
  detail::require_nonparabolic(sol, "limit_t0");
  const double extrapolated = detail::aitken(u_beta(sol, beta, 1e-2).value, u_beta(sol, beta, 1e-3).value,
                                             u_beta(sol, beta, 1e-4).value);
  return {extrapolated, u_beta_limit_formula(sol, beta)};
}

/// Spheroid version: the far field is Euclidean, so the limit is Cap^{1-beta} |S^2|.
inline LimitEstimate limit_t0(const SpheroidPotential& sp, double beta) {
  const double extrapolated = detail::aitken(u_beta(sp, beta, 1e-2).value, u_beta(sp, beta, 1e-3).value,
                                             u_beta(sp, beta, 1e-4).value);
  return {extrapolated, std::pow(sp.capacity, 1.0 - beta) * sphere_area(3)};
}

/// Colding's A_beta(r), computed through b = u^{-1/(n-2)}.
inline double colding_a_beta(const PotentialSolution& sol, double beta, double r) {
  detail::require_nonparabolic(sol, "colding_a_beta");
  const auto& m = sol.manifold();
  const int n = m.n();
  const double c = detail::conformal_exponent(n);
  // {b = r} = {u = r^{-(n-2)}}
  const double level = std::pow(r, -(n - 2.0));
  const double rho = sol.level_radius(level);
  const double grad_b = std::pow(level, -c) * sol.grad_mag(rho) / (n - 2);
  return std::pow(r, 1.0 - n) * std::pow(grad_b, beta + 1.0) * m.sphere_area_at(rho);
}

/// Phi_beta(s) = (n-2)^{beta+1} A_beta(e^{s/(n-2)}) over an s-grid, plus the
/// sign of dA_beta/dr by finite differences.
inline std::vector<CheckReport> relation_check(const PotentialSolution& sol, double beta,
                                               const std::vector<double>& s_grid) {
  detail::require_nonparabolic(sol, "relation_check");
  const int n = sol.n();
  const std::string model = sol.manifold().id();
  double worst_relation = 0.0;
  double worst_sign = 0.0;
  const double scale = colding_a_beta(sol, beta, 1.0);
  for (double s : s_grid) {
    const double phi = phi_beta(sol, beta, s).value;
    const double r = std::exp(s / (n - 2));
    const double a = colding_a_beta(sol, beta, r);
    const double rhs = std::pow(n - 2.0, beta + 1.0) * a;
    worst_relation = std::max(worst_relation, std::abs(phi - rhs) / std::abs(phi));
    const double da = detail::level_derivative([&](double x) { return colding_a_beta(sol, beta, x); }, r,
                                               1e-3 * r, -1);
    worst_sign = std::max(worst_sign, da / scale);
  }
  return {make_report("monotone", "colding.relation", model, worst_relation, 1e-10, s_grid.size(), {{"beta", beta}}),
          make_report("monotone", "colding.decreasing", model, std::max(worst_sign, 0.0), 1e-6, s_grid.size(),
                      {{"beta", beta}})};
}

/// |grad phi|_g~ = |Du|/u^{(n-1)/(n-2)} attains its supremum on the boundary.
inline CheckReport sharp_gradient_check(const PotentialSolution& sol, int grid_points = 256,
                                        double radius_factor = 1e6) {
  detail::require_nonparabolic(sol, "sharp_gradient_check");
  const int n = sol.n();
  const double c = detail::conformal_exponent(n);
  const double r0 = sol.r0();
  const double at_boundary = sol.grad_mag(r0);  // u(r0) = 1
  double sup = at_boundary;
  for (double r : detail::geometric_grid(r0, radius_factor * r0, grid_points)) {
    sup = std::max(sup, sol.grad_mag(r) / std::pow(sol.value(r), c));
  }
  return make_report("monotone", "sharp_gradient", sol.manifold().id(), (sup - at_boundary) / at_boundary, 1e-10,
                     grid_points, {{"boundary_value", at_boundary}, {"sup", sup}});
}

/// sup of |f''| on a geometric grid over [r_from, 1e6 r_from].
inline double warp_curvature_sup(const ModelManifold& m, double r_from, int grid_points = 512) {
  double sup = 0.0;
  for (double r : detail::geometric_grid(r_from, 1e6 * r_from, grid_points)) sup = std::max(sup, std::abs(m.d2f(r)));
  return sup;
}

/// Bulk integral of dU_beta/dt on {u < t0} plus sup |f''| beyond the level
/// set; both vanish exactly on cones.
inline double rigidity_residual(const PotentialSolution& sol, double beta, double t0) {
  detail::require_nonparabolic(sol, "rigidity_residual");
  const double bulk = du_beta(sol, beta, t0).bulk;
  return std::abs(bulk) + warp_curvature_sup(sol.manifold(), sol.level_radius(t0));
}

// ---------------------------------------------------------------------------
// Series.

inline MonotoneSeries u_series(const PotentialSolution& sol, double beta, const std::vector<double>& t_grid,
                               bool with_limit = true) {
  MonotoneSeries series;
  series.kind = SeriesKind::U;
  series.model = sol.manifold().id();
  series.n = sol.n();
  series.beta = beta;
  for (double t : t_grid) series.samples.push_back(sample_u(sol, beta, t));
  std::sort(series.samples.begin(), series.samples.end(),
            [](const MonotoneSample& a, const MonotoneSample& b) { return a.level < b.level; });
  if (with_limit) {
    const auto lim = limit_t0(sol, beta);
    series.limit_value = lim.extrapolated;
    series.limit_formula = lim.formula;
  }
  return series;
}

inline MonotoneSeries psi_series(const PotentialSolution& sol, double beta, const std::vector<double>& s_grid) {
  MonotoneSeries series;
  series.kind = SeriesKind::Psi;
  series.model = sol.manifold().id();
  series.n = sol.n();
  series.beta = beta;
  for (double s : s_grid) series.samples.push_back(sample_psi(sol, beta, s));
  std::sort(series.samples.begin(), series.samples.end(),
            [](const MonotoneSample& a, const MonotoneSample& b) { return a.level < b.level; });
  return series;
}

/// Largest decrease of U (or increase of Psi) between consecutive levels,
/// normalized by `scale`. Samples must be sorted by level.
inline double monotonicity_violation(const MonotoneSeries& series, double scale) {
  double worst = 0.0;
  for (std::size_t i = 1; i < series.samples.size(); ++i) {
    const double step = series.samples[i].value - series.samples[i - 1].value;
    // U is nondecreasing in t; Psi is nonincreasing in s.
    const double bad = series.kind == SeriesKind::Psi ? step : -step;
    worst = std::max(worst, bad / scale);
  }
  return worst;
}

}  // namespace capmono

#endif  // CAPMONO_MONOTONE_HPP
