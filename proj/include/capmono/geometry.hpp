#ifndef CAPMONO_GEOMETRY_HPP
#define CAPMONO_GEOMETRY_HPP

// Rotationally symmetric model manifolds g = dr^2 + f(r)^2 g_cross over a
// round (possibly quotient-scaled) cross-section of area omega.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "capmono/error.hpp"
#include "capmono/format.hpp"
#include "capmono/numerics.hpp"

namespace capmono {

/// Area of the unit round sphere S^{n-1} in R^n.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

struct WarpProfile {
  std::string family;
  std::map<std::string, double> params;

  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  /// Closed-form K(n, r) of the exterior potential, when the family has one.
  std::function<double(int, double)> cone_defect;

  double slope = 0.0;        // lim f'(r)
  double growth = 1.0;       // f(r) ~ r^growth at infinity (0 for bounded warps)
  double tail_radius = 1.0;  // |f(r)/r - slope| <= tail_bound beyond this radius
  double tail_bound = 0.0;
  double r_min = 0.0;        // left end of the warp domain
  bool origin_closed = false;  // f(0) = 0: the warp closes off a pole
  bool smooth_origin = false;  // additionally f'(0) = 1

  bool in_domain(double r) const { return r >= r_min && (r > 0.0 || !origin_closed) && std::isfinite(r); }
};

namespace profiles {

inline WarpProfile euclidean() {
  WarpProfile w;
  w.family = "euclidean";
  w.f = [](double r) { return r; };
  w.df = [](double) { return 1.0; };
  w.d2f = [](double) { return 0.0; };
  w.cone_defect = [](int, double) { return 0.0; };
  w.slope = 1.0;
  w.origin_closed = true;
  w.smooth_origin = true;
  return w;
}

/// Metric cone of opening alpha; singular at the pole unless alpha = 1.
inline WarpProfile cone(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::DomainError, "cone needs alpha in (0, 1]");
  WarpProfile w;
  w.family = "cone";
  w.params = {{"alpha", alpha}};
  w.f = [alpha](double r) { return alpha * r; };
  w.df = [alpha](double) { return alpha; };
  w.d2f = [](double) { return 0.0; };
  w.cone_defect = [](int, double) { return 0.0; };
  w.slope = alpha;
  w.origin_closed = true;
  w.smooth_origin = alpha == 1.0;
  return w;
}

/// f(r) = alpha r + (1 - alpha)(1 - e^{-r}): Euclidean near the pole,
/// asymptotic to the alpha-cone.
inline WarpProfile smoothed_cone(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::DomainError, "smoothed_cone needs alpha in (0, 1]");
  }
  WarpProfile w;
  w.family = "smoothed_cone";
  w.params = {{"alpha", alpha}};
  const double beta = 1.0 - alpha;
  w.f = [alpha, beta](double r) { return alpha * r - beta * std::expm1(-r); };
  w.df = [alpha, beta](double r) { return alpha + beta * std::exp(-r); };
  w.d2f = [beta](double r) { return -beta * std::exp(-r); };
  w.slope = alpha;
  w.tail_radius = 10.0;
  w.tail_bound = beta / 10.0;
  w.origin_closed = true;
  w.smooth_origin = true;
  return w;
}

/// f = tanh r: bounded warp, parabolic in every dimension.
inline WarpProfile tanh_profile() {
  WarpProfile w;
  w.family = "tanh";
  w.f = [](double r) { return std::tanh(r); };
  w.df = [](double r) {
    const double c = std::cosh(r);
    return 1.0 / (c * c);
  };
  w.d2f = [](double r) {
    const double c = std::cosh(r);
    return -2.0 * std::tanh(r) / (c * c);
  };
  w.slope = 0.0;
  w.growth = 0.0;
  w.tail_radius = 1.0;
  w.tail_bound = 1.0;
  w.origin_closed = true;
  w.smooth_origin = true;
  return w;
}

/// Half cylinder f = 1 on [r_start, inf).
inline WarpProfile cylinder_end(double r_start = 0.0) {
  if (!(r_start >= 0.0)) throw Error(ErrorKind::DomainError, "cylinder_end needs r_start >= 0");
  WarpProfile w;
  w.family = "cylinder_end";
  if (r_start != 0.0) w.params = {{"r_start", r_start}};
  w.f = [](double) { return 1.0; };
  w.df = [](double) { return 0.0; };
  w.d2f = [](double) { return 0.0; };
  w.slope = 0.0;
  w.growth = 0.0;
  w.tail_bound = 1.0;
  w.r_min = r_start;
  return w;
}

/// f = r^gamma on [r_start, inf). The default r_start = gamma^{1/(1-gamma)}
/// is where f' = 1, so f' <= 1 (and Ric >= 0) on the whole domain.
inline WarpProfile power(double gamma, double r_start = -1.0) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorKind::DomainError, "power needs gamma in (0, 1)");
  const double natural = std::pow(gamma, 1.0 / (1.0 - gamma));
  if (r_start < 0.0) r_start = natural;
  if (r_start < natural) {
    throw Error(ErrorKind::DomainError, "power r_start must be >= gamma^{1/(1-gamma)} for Ric >= 0");
  }
  WarpProfile w;
  w.family = "power";
  w.params = {{"gamma", gamma}};
  w.f = [gamma](double r) { return std::pow(r, gamma); };
  w.df = [gamma](double r) { return gamma * std::pow(r, gamma - 1.0); };
  w.d2f = [gamma](double r) { return gamma * (gamma - 1.0) * std::pow(r, gamma - 2.0); };
  w.cone_defect = [gamma](int n, double) { return (1.0 - gamma) / (gamma * (n - 1) - 1.0); };
  w.slope = 0.0;
  w.growth = gamma;
  w.tail_radius = 1.0;
  w.tail_bound = 1.0;
  w.r_min = r_start;
  return w;
}

}  // namespace profiles

class ModelManifold {
 public:
  /// omega_factor scales the cross-section area: omega = omega_factor |S^{n-1}|,
  /// e.g. 1/card(Gamma) for a quotient S^{n-1}/Gamma.
  ModelManifold(int n, WarpProfile warp, double omega_factor = 1.0)
      : n_(n), warp_(std::move(warp)), omega_factor_(omega_factor) {
    if (n < 3) throw Error(ErrorKind::DomainError, "dimension n must be >= 3, got " + std::to_string(n));
    if (!(omega_factor > 0.0 && omega_factor <= 1.0)) {
      throw Error(ErrorKind::DomainError, "omega factor must lie in (0, 1]");
    }
    omega_ = omega_factor * sphere_area(n);
  }

  int n() const { return n_; }
  const WarpProfile& warp() const { return warp_; }
  double omega() const { return omega_; }
  double omega_factor() const { return omega_factor_; }

  double f(double r) const { return warp_.f(r); }
  double df(double r) const { return warp_.df(r); }
  double d2f(double r) const { return warp_.d2f(r); }

  /// Area of the coordinate sphere {r} : omega f^{n-1}.
  double sphere_area_at(double r) const { return omega_ * std::pow(f(r), n_ - 1); }
  /// Mean curvature of {r} w.r.t. the outward normal d/dr.
  double mean_curvature(double r) const { return (n_ - 1) * df(r) / f(r); }

  /// e.g. "cone:alpha=0.5:n=3" (omega factor appended when != 1).
  std::string id() const {
    std::string s = warp_.family;
    for (const auto& [k, v] : warp_.params) s += ":" + k + "=" + format_number(v);
    s += ":n=" + std::to_string(n_);
    if (omega_factor_ != 1.0) s += ":omega=" + format_number(omega_factor_);
    return s;
  }

 private:
  int n_;
  WarpProfile warp_;
  double omega_factor_;
  double omega_;
};

struct RicciEigenvalues {
  double radial;
  double tangential;
};

inline void require_in_domain(const ModelManifold& m, double r) {
  if (!m.warp().in_domain(r) || !(m.f(r) > 0.0)) {
    throw Error(ErrorKind::DomainError,
                "r = " + format_number(r) + " outside the domain of " + m.warp().family);
  }
}

/// Ricci eigenvalues of dr^2 + f^2 g_{S^{n-1}}: on d/dr and on the tangent
/// directions of the coordinate spheres.
inline RicciEigenvalues ricci_eigenvalues(const ModelManifold& m, double r) {
  require_in_domain(m, r);
  const int n = m.n();
  const double f = m.f(r), fp = m.df(r), fpp = m.d2f(r);
  return {-(n - 1) * fpp / f, -fpp / f + (n - 2) * (1.0 - fp * fp) / (f * f)};
}

/// Smallest Ricci eigenvalue over a geometric grid of `per_decade` points per
/// decade covering [r_lo, r_hi].
inline double min_ricci(const ModelManifold& m, double r_lo, double r_hi, int per_decade = 10000) {
  const double decades = std::log10(r_hi / r_lo);
  const int count = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (count - 1));
    const auto ev = ricci_eigenvalues(m, r);
    lowest = std::min({lowest, ev.radial, ev.tangential});
  }
  return lowest;
}

/// Default sampling window for admissibility scans.
inline std::pair<double, double> admissibility_window(const ModelManifold& m) {
  const double lo = std::max(m.warp().r_min, 1e-4);
  return {lo, std::max(1e6, 1e6 * lo)};
}

struct BishopGromov {
  double volume_ratio;  // Theta(r) = n |B(r)| / (r^n |S^{n-1}|)
  double area_ratio;    // theta(r) = |dB(r)| / (r^{n-1} |S^{n-1}|)
  double area;
  double volume;
};

/// Volume of the coordinate ball {r' < r}.
inline double ball_volume(const ModelManifold& m, double r) {
  if (!m.warp().origin_closed) {
    throw Error(ErrorKind::DomainError, m.warp().family + " is not origin-closed: ball volume undefined");
  }
  const int n = m.n();
  return m.omega() * numerics::integrate([&](double s) { return std::pow(m.f(s), n - 1); }, 0.0, r);
}

inline BishopGromov bishop_gromov(const ModelManifold& m, double r) {
  if (!m.warp().origin_closed) {
    throw Error(ErrorKind::DomainError, m.warp().family + " is not origin-closed: Bishop-Gromov ratios undefined");
  }
  if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "bishop_gromov needs r > 0");
  const int n = m.n();
  const double s = sphere_area(n);
  BishopGromov bg{};
  bg.area = m.sphere_area_at(r);
  bg.volume = ball_volume(m, r);
  bg.volume_ratio = n * bg.volume / (std::pow(r, n) * s);
  bg.area_ratio = bg.area / (std::pow(r, n - 1) * s);
  return bg;
}

/// Asymptotic volume ratio slope^{n-1} omega / |S^{n-1}|.
inline double avr(const ModelManifold& m) {
  return std::pow(m.warp().slope, m.n() - 1) * m.omega_factor();
}

/// theta at a large radius, the numerical counterpart of avr().
inline double avr_from_areas(const ModelManifold& m, double radius_factor = 1e2) {
  const double r = radius_factor * std::max(m.warp().tail_radius, 1.0);
  return m.sphere_area_at(r) / (std::pow(r, m.n() - 1) * sphere_area(m.n()));
}

enum class Parabolicity { Nonparabolic, Parabolic };

inline std::string_view to_string(Parabolicity p) {
  return p == Parabolicity::Nonparabolic ? "nonparabolic" : "parabolic";
}

namespace detail {

// Far-field radius at which asymptotic power laws are read off.
inline double far_radius(const ModelManifold& m) { return 1e8 * std::max(1.0, m.warp().tail_radius); }

}  // namespace detail

/// Power-law decay exponent of f^{1-n}, read off as (n-1) r f'/f far out.
inline double tail_decay_exponent(const ModelManifold& m) {
  const double r = detail::far_radius(m);
  return (m.n() - 1) * r * m.df(r) / m.f(r);
}

/// Radial criterion: nonparabolic iff the integral of f^{1-n} over [r0, inf)
/// converges. For origin-closed warps the verdict is cross-checked against
/// the Varopoulos criterion on the volume growth of coordinate balls.
inline Parabolicity classify_parabolicity(const ModelManifold& m, double r0) {
  require_in_domain(m, r0);
  constexpr double margin = 1e-6;
  const double p_radial = tail_decay_exponent(m);
  const bool radial_finite = p_radial > 1.0 + margin;
  if (radial_finite) {
    // Confirm numerically that the tail integral is finite.
    const int n = m.n();
    numerics::integrate_improper([&](double s) { return std::pow(m.f(s), 1 - n); }, r0, p_radial);
  }

  if (m.warp().origin_closed) {
    // Varopoulos: integral of r/|B(r)| over [1, inf). |B(r)| ~ r^{1 + k} with
    // k = r |dB|/|B| - 1, so the integrand decays like r^{-k}.
    const double r = detail::far_radius(m);
    const double k = r * m.sphere_area_at(r) / ball_volume(m, r) - 1.0;
    const bool varopoulos_finite = k > 1.0 + margin;
    if (varopoulos_finite != radial_finite) {
      throw Error(ErrorKind::CriterionMismatch, "radial and Varopoulos criteria disagree on " + m.id());
    }
  }
  return radial_finite ? Parabolicity::Nonparabolic : Parabolicity::Parabolic;
}

}  // namespace capmono

#endif  // CAPMONO_GEOMETRY_HPP
