#ifndef CAPMONO_WILLMORE_HPP
#define CAPMONO_WILLMORE_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "capmono/error.hpp"
#include "capmono/geometry.hpp"
#include "capmono/monotone.hpp"
#include "capmono/potential.hpp"
#include "capmono/report.hpp"

namespace capmono {

/// Coordinate sphere {r} of a model manifold.
struct CoordinateSphere {
  const ModelManifold* manifold;
  double r;
};

/// Confocal spheroid {xi} around the prolate spheroid with semi-axes a >= b,
/// in Euclidean 3-space.
struct ConfocalSpheroid {
  SpheroidPotential potential;
  double xi;
};

using SurfaceSpec = std::variant<CoordinateSphere, ConfocalSpheroid>;

inline SurfaceSpec spheroid_surface(double a, double b) {
  auto sp = spheroid_exterior(a, b);
  return ConfocalSpheroid{sp, sp.level_coordinate(1.0)};
}

inline double surface_area(const SurfaceSpec& s) {
  if (const auto* cs = std::get_if<CoordinateSphere>(&s)) return cs->manifold->sphere_area_at(cs->r);
  const auto& sp = std::get<ConfocalSpheroid>(s);
  return sp.potential.surface_integral(sp.xi, [](double, double) { return 1.0; });
}

/// int_S |H/(n-1)|^{n-1} dsigma.
inline double willmore_energy(const SurfaceSpec& s, int n) {
  if (const auto* cs = std::get_if<CoordinateSphere>(&s)) {
    const auto& m = *cs->manifold;
    // |H/(n-1)|^{n-1} f^{n-1} = |f'|^{n-1}
    return m.omega() * std::pow(std::abs(m.df(cs->r)), n - 1);
  }
  if (n != 3) throw Error(ErrorKind::DomainError, "spheroid surfaces live in R^3");
  const auto& sp = std::get<ConfocalSpheroid>(s);
  return sp.potential.surface_integral(sp.xi, [](double, double h) { return 0.25 * h * h; });
}

/// Willmore-type inequality  energy >= AVR |S^{n-1}|.
///
/// Equality is only meaningful with AVR > 0; there it must coincide with a
/// vanishing warp curvature outside the surface (the cone case), otherwise
/// the report fails.
inline CheckReport check_willmore(const ModelManifold& m, const SurfaceSpec& s, const std::string& surface_label) {
  const int n = m.n();
  const double energy = willmore_energy(s, n);
  const double volume_ratio = avr(m);
  const double threshold = volume_ratio * sphere_area(n);
  const double margin = energy - threshold;
  const double scale = std::max(threshold, energy);

  std::map<std::string, double> params{{"energy", energy}, {"threshold", threshold}, {"margin", margin}};
  CheckReport report;
  report.suite = "willmore";
  report.check = "inequality";
  report.model = m.id() + "/" + surface_label;
  report.samples = 1;
  report.tolerance = 1e-10;
  report.max_violation = threshold > 0.0 ? std::max(0.0, -margin) / threshold : std::max(0.0, -margin);

  const bool equality = volume_ratio > 0.0 && std::abs(margin) <= 1e-10 * scale;
  if (equality) {
    double rigidity = 0.0;
    if (const auto* cs = std::get_if<CoordinateSphere>(&s)) {
      rigidity = warp_curvature_sup(m, cs->r);
    } else {
      const auto& sp = std::get<ConfocalSpheroid>(s);
      rigidity = sp.potential.is_sphere() ? 0.0 : 1.0;
    }
    params["rigidity_residual"] = rigidity;
    if (rigidity > 0.0) report.max_violation = std::max(report.max_violation, 1.0);
  }
  report.params = std::move(params);
  report.settle(equality);
  return report;
}

struct KasueBound {
  double bound;              // lower bound for sup H on the boundary
  double sup_h;              // sup of H on the boundary
  double identity_residual;  // |LHS - RHS| of the weighted-mean identity
  double weight;             // int_{dOmega} |Du|^beta
  double statement_level;    // [U(0+) + U'(0+)/beta] / weight (reported only)
};

/// Nonparabolic: int_{dOmega} H |Du|^beta = U'(1)/beta + ((n-1)/(n-2)) U(1),
/// bound = that / int |Du|^beta. Parabolic: bound = -Psi'(0)/beta / int |D psi|^beta.
inline KasueBound kasue_bounds(const PotentialSolution& sol, double beta) {
  const auto& m = sol.manifold();
  const int n = m.n();
  if (beta < beta_threshold(n) - 1e-15) throw Error(ErrorKind::DomainError, "Kasue bounds need beta >= (n-2)/(n-1)");
  const double r0 = sol.r0();
  const double g0 = sol.grad_mag(r0);
  const double area0 = m.sphere_area_at(r0);
  const double h0 = m.mean_curvature(r0);

  KasueBound k{};
  k.sup_h = h0;
  k.weight = std::pow(g0, beta) * area0;
  const double lhs = h0 * k.weight;
  if (sol.nonparabolic()) {
    const double u1 = u_beta(sol, beta, 1.0).value;
    const double du1 = du_beta(sol, beta, 1.0).surface;
    const double rhs = du1 / beta + (static_cast<double>(n - 1) / (n - 2)) * u1;
    k.bound = rhs / k.weight;
    k.identity_residual = std::abs(lhs - rhs);
    const double u_zero = u_beta_limit_formula(sol, beta);
    const double du_zero = du_beta(sol, beta, 1e-4).surface;
    k.statement_level = (u_zero + du_zero / beta) / k.weight;
  } else {
    const double dpsi0 = dpsi_beta(sol, beta, 0.0).surface;
    const double rhs = -dpsi0 / beta;
    k.bound = rhs / k.weight;
    k.identity_residual = std::abs(lhs - rhs);
    k.statement_level = k.bound;
  }
  return k;
}

struct DerivedConstants {
  std::optional<double> iso_const;
  std::optional<double> sobolev_const;
  double ale_infimum;
};

inline double iso_constant(const ModelManifold& m) {
  if (m.n() != 3) throw Error(ErrorKind::DomainError, "the isoperimetric constant is three-dimensional");
  return 36.0 * std::numbers::pi * avr(m);
}

inline double sobolev_constant(const ModelManifold& m) { return std::cbrt(iso_constant(m)); }

/// AVR |S^{n-1}|, the infimum of the Willmore-type energy.
inline double ale_infimum(const ModelManifold& m) { return avr(m) * sphere_area(m.n()); }

inline DerivedConstants derived_constants(const ModelManifold& m) {
  DerivedConstants d{std::nullopt, std::nullopt, ale_infimum(m)};
  if (m.n() == 3) {
    d.iso_const = iso_constant(m);
    d.sobolev_const = sobolev_constant(m);
  }
  return d;
}

}  // namespace capmono

#endif  // CAPMONO_WILLMORE_HPP
