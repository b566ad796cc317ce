#ifndef CAPMONO_POTENTIAL_HPP
#define CAPMONO_POTENTIAL_HPP

// Exterior harmonic potentials on the model manifolds, plus the closed-form
// capacitary potential of a prolate spheroid in Euclidean 3-space.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "capmono/error.hpp"
#include "capmono/geometry.hpp"
#include "capmono/numerics.hpp"
#include "capmono/report.hpp"

namespace capmono {

/// Radial solution of the exterior problem outside the coordinate ball
/// {r < r0}.
///
/// Nonparabolic: u(r) = I(r)/I(r0) with I(r) = int_r^inf f^{1-n}, so u = 1 on
/// the boundary and u -> 0 at infinity. Parabolic: psi(r) = int_{r0}^r f^{1-n},
/// vanishing on the boundary and unbounded.
///
/// For the nonparabolic branch I is evaluated in the integrated-by-parts form
///
///   I(r) = f^{2-n} / ((n-2) f') * (1 + K(r)),
///   K(r) = f' f^{n-2} int_r^inf f^{2-n} (-f'') / f'^2,
///
/// valid whenever f' > 0 and f^{2-n}/f' -> 0. K >= 0 is the exact defect from
/// the cone (K = 0 iff f'' = 0 beyond r), which keeps the level-set quantity
/// H - ((n-1)/(n-2))|D log u| = (n-1)(f'/f) K/(1+K) free of cancellation.
class PotentialSolution {
 public:
  PotentialSolution(std::shared_ptr<const ModelManifold> manifold, double r0, Parabolicity kind)
      : manifold_(std::move(manifold)), r0_(r0), kind_(kind) {
    require_in_domain(*manifold_, r0_);
    tail_exponent_ = tail_decay_exponent(*manifold_);
    if (kind_ == Parabolicity::Nonparabolic) {
      i0_ = tail_integral(r0_);
      capacity_ = manifold_->omega_factor() / ((manifold_->n() - 2) * i0_);
    }
  }

  Parabolicity kind() const { return kind_; }
  bool nonparabolic() const { return kind_ == Parabolicity::Nonparabolic; }
  const ModelManifold& manifold() const { return *manifold_; }
  std::shared_ptr<const ModelManifold> manifold_ptr() const { return manifold_; }
  int n() const { return manifold_->n(); }
  double r0() const { return r0_; }
  double boundary_tail() const { return i0_; }
  double tail_exponent() const { return tail_exponent_; }

  /// Cap(Omega), normalized so the unit ball of R^n has capacity 1.
  double capacity() const {
    require_nonparabolic("capacity");
    return capacity_;
  }

  /// K(r) of the class comment.
  double cone_defect(double r) const {
    require_nonparabolic("cone_defect");
    const auto& m = *manifold_;
    const int n = m.n();
    if (m.warp().cone_defect) return m.warp().cone_defect(n, r);
    auto integrand = [&m, n](double s) {
      const double fp = m.df(s);
      return std::pow(m.f(s), 2 - n) * (-m.d2f(s)) / (fp * fp);
    };
    const double tail = numerics::integrate_improper(integrand, r, tail_exponent_);
    return m.df(r) * std::pow(m.f(r), n - 2) * tail;
  }

  /// I(r) = int_r^inf f^{1-n}.
  double tail_integral(double r) const {
    require_nonparabolic("tail_integral");
    const auto& m = *manifold_;
    const int n = m.n();
    const double fp = m.df(r);
    return std::pow(m.f(r), 2 - n) / ((n - 2) * fp) * (1.0 + cone_defect(r));
  }

  /// Direct quadrature of int_r^inf f^{1-n}; independent of tail_integral.
  double tail_integral_direct(double r) const {
    const int n = manifold_->n();
    return numerics::integrate_improper([this, n](double s) { return std::pow(manifold_->f(s), 1 - n); },
                                        r, tail_exponent_);
  }

  /// u(r) or psi(r).
  double value(double r) const {
    if (nonparabolic()) return tail_integral(r) / i0_;
    const int n = manifold_->n();
    auto integrand = [this, n](double s) { return std::pow(manifold_->f(s), 1 - n); };
    return r >= r0_ ? numerics::integrate(integrand, r0_, r) : -numerics::integrate(integrand, r, r0_);
  }

  /// |Du| or |D psi|.
  double grad_mag(double r) const {
    const double g = std::pow(manifold_->f(r), 1 - manifold_->n());
    return nonparabolic() ? g / i0_ : g;
  }

  /// Signed second radial derivative u'' (or psi''), from the ODE
  /// u'' + (n-1)(f'/f) u' = 0.
  double second_derivative(double r) const {
    const auto& m = *manifold_;
    const double du = nonparabolic() ? -grad_mag(r) : grad_mag(r);
    return -(m.n() - 1) * m.df(r) / m.f(r) * du;
  }

  /// Radius of the level set {u = level} (or {psi = level}).
  double level_radius(double level) const {
    {
      std::lock_guard lock(memo_->mutex);
      if (auto it = memo_->radii.find(level); it != memo_->radii.end()) return it->second;
    }
    const double r = solve_level(level);
    std::lock_guard lock(memo_->mutex);
    memo_->radii.emplace(level, r);
    return r;
  }

 private:
  struct LevelMemo {
    std::mutex mutex;
    std::unordered_map<double, double> radii;
  };

  double solve_level(double level) const {
    const auto& m = *manifold_;
    const double r_floor = m.warp().origin_closed ? 0.0 : m.warp().r_min;
    if (nonparabolic()) {
      if (!(level > 0.0)) throw Error(ErrorKind::RootNotBracketed, "potential level must be > 0");
      const double target = std::log(level * i0_);
      auto log_tail = [this](double x) { return std::log(tail_integral(std::exp(x))); };
      auto dlog_tail = [this](double x) {
        const double r = std::exp(x);
        return -r * std::pow(manifold_->f(r), 1 - manifold_->n()) / tail_integral(r);
      };
      double lo = r0_, hi = r0_;
      if (level == 1.0) return r0_;
      if (level > 1.0) {
        for (int k = 0; k < 200 && value(lo) < level; ++k) {
          const double next = 0.5 * lo;
          if (next <= r_floor) {
            lo = r_floor + 0.5 * (lo - r_floor);
            if (lo <= r_floor || !(m.f(lo) > 0.0)) {
              throw Error(ErrorKind::RootNotBracketed, "level above the potential's range");
            }
          } else {
            lo = next;
          }
        }
        if (value(lo) < level) throw Error(ErrorKind::RootNotBracketed, "level above the potential's range");
      } else {
        // Start from the power law matching the log-slope of I at r0.
        const double slope0 = r0_ * std::pow(m.f(r0_), 1 - m.n()) / i0_;
        const double guess = r0_ * std::pow(level, -1.0 / slope0);
        if (std::isfinite(guess) && guess > r0_) {
          if (value(guess) > level) {
            lo = guess;
            hi = 2.0 * guess;
          } else {
            hi = guess;
            lo = std::max(r0_, 0.5 * guess);
            for (int k = 0; k < 2000 && lo > r0_ && value(lo) < level; ++k) lo = std::max(r0_, 0.5 * lo);
          }
        }
        for (int k = 0; k < 2000 && value(hi) > level; ++k) {
          lo = hi;
          hi *= 2.0;
        }
        if (value(hi) > level) throw Error(ErrorKind::RootNotBracketed, "level below the potential's range");
      }
      return std::exp(numerics::solve_monotone(log_tail, dlog_tail, target, std::log(lo), std::log(hi)));
    }

    auto psi = [this](double r) { return value(r); };
    auto dpsi = [this](double r) { return grad_mag(r); };
    double lo = r0_, hi = r0_;
    if (level == 0.0) return r0_;
    if (level > 0.0) {
      double step = r0_;
      for (int k = 0; k < 200 && psi(hi) < level; ++k) {
        hi += step;
        step *= 2.0;
      }
      if (psi(hi) < level) throw Error(ErrorKind::RootNotBracketed, "psi level out of range");
    } else {
      for (int k = 0; k < 200 && psi(lo) > level; ++k) {
        lo = r_floor + 0.5 * (lo - r_floor);
        if (lo <= r_floor || !(m.f(lo) > 0.0)) break;
      }
      if (!(lo > r_floor) || psi(lo) > level) {
        throw Error(ErrorKind::RootNotBracketed, "negative psi level outside the warp domain");
      }
    }
    return numerics::solve_monotone(psi, dpsi, level, lo, hi);
  }

  void require_nonparabolic(const char* what) const {
    if (!nonparabolic()) throw Error(ErrorKind::NotApplicable, std::string(what) + " needs a nonparabolic solution");
  }

  std::shared_ptr<const ModelManifold> manifold_;
  double r0_;
  Parabolicity kind_;
  double tail_exponent_ = 0.0;
  double i0_ = std::numeric_limits<double>::quiet_NaN();
  double capacity_ = std::numeric_limits<double>::quiet_NaN();
  std::shared_ptr<LevelMemo> memo_ = std::make_shared<LevelMemo>();
};

/// Selects the nonparabolic or parabolic branch via classify_parabolicity.
inline PotentialSolution solve_exterior(std::shared_ptr<const ModelManifold> m, double r0) {
  const Parabolicity kind = classify_parabolicity(*m, r0);
  return PotentialSolution(std::move(m), r0, kind);
}

inline PotentialSolution solve_exterior(const ModelManifold& m, double r0) {
  return solve_exterior(std::make_shared<const ModelManifold>(m), r0);
}

// ---------------------------------------------------------------------------
// Prolate spheroid x^2/b^2 + y^2/b^2 + z^2/a^2 = 1 in R^3 (a >= b).
//
// Prolate spheroidal coordinates (xi, eta, phi) with focal distance c:
//   z = c xi eta,  rho = c sqrt(xi^2 - 1) sqrt(1 - eta^2).
// The capacitary potential is u = Q0(xi)/Q0(xi0), Q0(xi) = arcoth(xi).
// The degenerate a = b case is the round sphere, handled with u = a/r.

struct SpheroidPotential {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double xi0 = std::numeric_limits<double>::infinity();
  double q0 = 0.0;  // Q0(xi0)
  double capacity = 1.0;

  bool is_sphere() const { return c == 0.0; }

  static double legendre_q0(double xi) { return 0.5 * std::log((xi + 1.0) / (xi - 1.0)); }

  /// u on the confocal spheroid xi (on the sphere of radius xi when a = b).
  double value(double xi) const { return is_sphere() ? a / xi : legendre_q0(xi) / q0; }

  /// Confocal coordinate of the level set {u = t}; closed-form inverse of Q0.
  double level_coordinate(double t) const {
    if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorKind::RootNotBracketed, "spheroid level must lie in (0, 1]");
    if (t == 1.0) return is_sphere() ? a : xi0;
    return is_sphere() ? a / t : 1.0 / std::tanh(t * q0);
  }

  /// |Du| at (xi, eta).
  double grad_mag(double xi, double eta) const {
    if (is_sphere()) return a / (xi * xi);
    return 1.0 / (c * q0 * std::sqrt(xi * xi - 1.0) * std::sqrt(xi * xi - eta * eta));
  }

  /// Surface measure of {xi} per unit eta, already integrated over phi.
  double area_density(double xi, double eta) const {
    if (is_sphere()) return 2.0 * std::numbers::pi * xi * xi;
    return 2.0 * std::numbers::pi * c * c * std::sqrt(xi * xi - eta * eta) * std::sqrt(xi * xi - 1.0);
  }

  /// Mean curvature (sum of principal curvatures, outward normal) of {xi}.
  double mean_curvature(double xi, double eta) const {
    if (is_sphere()) return 2.0 / xi;
    const double s2 = xi * xi - 1.0;
    const double q = xi * xi - eta * eta;
    const double meridian = xi * std::sqrt(s2) / (c * q * std::sqrt(q));
    const double parallel = xi / (std::sqrt(s2) * c * std::sqrt(q));
    return meridian + parallel;
  }

  /// Integral over the level set {xi} of g(|Du|, H) dsigma, by quadrature in
  /// eta (the integrand is even in eta).
  template <class G>
  double surface_integral(double xi, G&& g, const numerics::QuadSpec& spec = {}) const {
    if (is_sphere()) {
      return 4.0 * std::numbers::pi * xi * xi * g(grad_mag(xi, 0.0), mean_curvature(xi, 0.0));
    }
    auto integrand = [&](double eta) {
      return g(grad_mag(xi, eta), mean_curvature(xi, eta)) * area_density(xi, eta);
    };
    return 2.0 * numerics::integrate(integrand, 0.0, 1.0, spec);
  }
};

inline SpheroidPotential spheroid_exterior(double a, double b) {
  if (!(b > 0.0)) throw Error(ErrorKind::DomainError, "spheroid needs b > 0");
  if (!(a >= b)) throw Error(ErrorKind::DomainError, "spheroid needs a >= b (prolate)");
  SpheroidPotential s;
  s.a = a;
  s.b = b;
  if (a == b) return s;
  s.c = std::sqrt((a - b) * (a + b));
  s.xi0 = a / s.c;
  s.q0 = SpheroidPotential::legendre_q0(s.xi0);
  s.capacity = s.c / s.q0;
  return s;
}

// ---------------------------------------------------------------------------
// Asymptotic verification.

namespace detail {

inline std::vector<double> geometric_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return g;
}

}  // namespace detail

/// Checks the far-field behaviour of a nonparabolic potential against the
/// capacity and asymptotic volume ratio, returning one report per branch:
///   asymptotics.u_decay        |u r^{n-2} - Cap/AVR| / (Cap/AVR) at the largest radius
///   asymptotics.grad_l1        level-sphere L1 deviation of |Du| from its cone profile,
///                              relative to the same quantity at r0
///   asymptotics.yau            r |Du|/u stays bounded on the grid
///   asymptotics.li_yau         u(r) / int_r^inf s/|B(s)| ds bounded above and below
///   asymptotics.sphere_integral  int_{r} u^{(n-1)/(n-2)} against |S^{n-1}| AVR (Cap/AVR)^{(n-1)/(n-2)}
inline std::vector<CheckReport> verify_asymptotics(const PotentialSolution& sol, double radius_factor = 1e6,
                                                   int grid_points = 64) {
  const auto& m = sol.manifold();
  const std::string model = m.id();
  const std::string suite = "potential";
  std::vector<CheckReport> out;
  if (!sol.nonparabolic()) {
    for (const char* name : {"asymptotics.u_decay", "asymptotics.grad_l1", "asymptotics.yau",
                             "asymptotics.li_yau", "asymptotics.sphere_integral"}) {
      out.push_back(not_applicable(suite, name, model));
    }
    return out;
  }

  const int n = m.n();
  const double r0 = sol.r0();
  const double r_max = radius_factor * r0;
  const auto grid = detail::geometric_grid(r0, r_max, grid_points);
  const double volume_ratio = avr(m);
  const double cap = sol.capacity();

  // Yau: r |Du| / u.
  double yau_sup = 0.0;
  for (double r : grid) yau_sup = std::max(yau_sup, r * sol.grad_mag(r) / sol.value(r));
  out.push_back(make_report(suite, "asymptotics.yau", model, std::isfinite(yau_sup) ? 0.0 : 1.0, 0.0,
                            grid.size(), {{"sup", yau_sup}}));

  // Li-Yau sandwich, origin-closed models only (|B(s)| needs a pole).
  if (m.warp().origin_closed) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    const double p = std::max(tail_decay_exponent(m), 1.0 + 1e-3);
    for (double r : grid) {
      const double green = numerics::integrate_improper([&m](double s) { return s / ball_volume(m, s); }, r, p);
      const double ratio = sol.value(r) / green;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    const bool bounded = std::isfinite(hi) && lo > 0.0;
    out.push_back(make_report(suite, "asymptotics.li_yau", model, bounded ? 0.0 : 1.0, 0.0, grid.size(),
                              {{"min_ratio", lo}, {"max_ratio", hi}}));
  } else {
    out.push_back(not_applicable(suite, "asymptotics.li_yau", model));
  }

  if (!(volume_ratio > 0.0)) {
    out.push_back(not_applicable(suite, "asymptotics.u_decay", model));
    out.push_back(not_applicable(suite, "asymptotics.grad_l1", model));
    out.push_back(not_applicable(suite, "asymptotics.sphere_integral", model));
    return out;
  }

  const double ratio = cap / volume_ratio;
  const double u_far = sol.value(r_max) * std::pow(r_max, n - 2);
  out.push_back(make_report(suite, "asymptotics.u_decay", model, std::abs(u_far - ratio) / ratio, 1e-3, 1,
                            {{"r", r_max}, {"u_r_pow", u_far}, {"cap_over_avr", ratio}}));

  auto grad_l1 = [&](double r) {
    return m.sphere_area_at(r) * std::abs(sol.grad_mag(r) - (n - 2) * ratio * std::pow(r, 1 - n));
  };
  // On cones the r0 value is rounding noise; the flux A|Du| (the same on
  // every level set) is the reference there.
  const double flux = m.sphere_area_at(r0) * sol.grad_mag(r0);
  const double l1_start = grad_l1(r0);
  const double l1_far = grad_l1(r_max);
  const double l1_violation = l1_far / (l1_start > 1e-12 * flux ? l1_start : flux);
  out.push_back(make_report(suite, "asymptotics.grad_l1", model, l1_violation, 1e-3, 2,
                            {{"l1_r0", l1_start}, {"l1_far", l1_far}, {"flux", flux}}));

  const double expo = static_cast<double>(n - 1) / (n - 2);
  const double sphere_far = m.sphere_area_at(r_max) * std::pow(sol.value(r_max), expo);
  const double sphere_limit = sphere_area(n) * volume_ratio * std::pow(ratio, expo);
  out.push_back(make_report(suite, "asymptotics.sphere_integral", model,
                            std::abs(sphere_far - sphere_limit) / sphere_limit, 1e-3, 1,
                            {{"integral", sphere_far}, {"limit", sphere_limit}}));
  return out;
}

}  // namespace capmono

#endif  // CAPMONO_POTENTIAL_HPP
