#ifndef CAPMONO_NUMERICS_HPP
#define CAPMONO_NUMERICS_HPP

// Deterministic numeric kernels shared by every other module: adaptive
// Gauss-Legendre quadrature (finite and improper), an embedded Runge-Kutta
// 4(5) integrator with event location, Richardson-extrapolated finite
// differences and a bracketed root finder.
//
// Everything here is a pure function of its arguments. No global mutable
// state is touched, so all routines may be called concurrently.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "capmono/error.hpp"

namespace capmono::numerics {

struct QuadSpec {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  std::size_t max_subdivisions = std::size_t{1} << 16;
};

namespace detail {

inline constexpr int kPanelOrder = 15;

struct GaussRule {
  std::array<double, kPanelOrder> nodes{};
  std::array<double, kPanelOrder> weights{};
};

// Nodes/weights of the 15-point Gauss-Legendre rule on [-1, 1], obtained by
// Newton iteration on P_15 from the Chebyshev initial guesses.
inline const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule g;
    constexpr int n = kPanelOrder;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      g.nodes[i] = x;
      g.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
  }();
  return rule;
}

template <class F>
double gauss_panel(F& fn, double a, double b) {
  const auto& rule = gauss_rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < kPanelOrder; ++i) {
    const double v = fn(mid + half * rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::DomainError,
                  "non-finite integrand at x = " + std::to_string(mid + half * rule.nodes[i]));
    }
    sum += rule.weights[i] * v;
  }
  return half * sum;
}

struct Panel {
  double a;
  double b;
  double value;  // two-half refined estimate
  double error;
};

template <class F>
Panel make_panel(F& fn, double a, double b) {
  const double coarse = gauss_panel(fn, a, b);
  const double m = 0.5 * (a + b);
  const double fine = gauss_panel(fn, a, m) + gauss_panel(fn, m, b);
  return {a, b, fine, std::abs(fine - coarse)};
}

}  // namespace detail

/// Adaptive composite Gauss-Legendre quadrature of fn over [lo, hi].
///
/// Panels are bisected globally, worst error first, until the summed error
/// estimate falls below max(abs_tol, rel_tol * |I|). The final sum is taken
/// over panels in left-to-right order so the result does not depend on the
/// refinement history.
template <class F>
double integrate(F&& fn, double lo, double hi, const QuadSpec& spec = {}) {
  if (!(spec.rel_tol > 0.0) || spec.abs_tol < 0.0 || spec.max_subdivisions < 1) {
    throw Error(ErrorKind::DomainError, "invalid QuadSpec");
  }
  if (lo == hi) return 0.0;
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::DomainError, "integrate requires finite lo < hi");
  }

  using detail::Panel;
  auto worse = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> queue(worse);

  Panel first = detail::make_panel(fn, lo, hi);
  double total = first.value;
  double total_err = first.error;
  queue.push(first);

  std::size_t subdivisions = 0;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (subdivisions >= spec.max_subdivisions) {
      throw Error(ErrorKind::NonConvergence,
                  "quadrature subdivision budget exhausted on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
    }
    const Panel worst = queue.top();
    // Once panels reach the resolution of double precision there is nothing
    // left to refine.
    const double m = 0.5 * (worst.a + worst.b);
    if (!(worst.a < m && m < worst.b)) {
      throw Error(ErrorKind::NonConvergence, "quadrature panel collapsed below machine resolution");
    }
    queue.pop();
    const Panel left = detail::make_panel(fn, worst.a, m);
    const Panel right = detail::make_panel(fn, m, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++subdivisions;
  }

  std::vector<Panel> panels;
  panels.reserve(queue.size());
  while (!queue.empty()) {
    panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  // Neumaier summation.
  double sum = 0.0, comp = 0.0;
  for (const auto& p : panels) {
    const double t = sum + p.value;
    comp += std::abs(sum) >= std::abs(p.value) ? (sum - t) + p.value : (p.value - t) + sum;
    sum = t;
  }
  return sum + comp;
}

/// Integral of fn over [lo, +inf) for lo > 0, where fn(s) decays like
/// s^-decay_exponent.
///
/// The tail is mapped onto (0, 1] with s = lo * x^-m. For decay_exponent >= 2
/// m = 1 (the plain 1/x substitution); slower power decay 1 < p < 2 uses
/// m = 1/(p - 1), which keeps the mapped integrand bounded at x = 0.
template <class F>
double integrate_improper(F&& fn, double lo, double decay_exponent, const QuadSpec& spec = {}) {
  if (!(lo > 0.0) || !std::isfinite(lo)) {
    throw Error(ErrorKind::DomainError, "integrate_improper requires a finite lo > 0");
  }
  if (!(decay_exponent > 1.0 + std::max(spec.abs_tol, 1e-12))) {
    throw Error(ErrorKind::Divergence,
                "decay exponent " + std::to_string(decay_exponent) + " does not give a finite tail");
  }
  const double m = decay_exponent >= 2.0 ? 1.0 : 1.0 / (decay_exponent - 1.0);
  auto mapped = [&fn, lo, m](double x) {
    const double xm = std::pow(x, -m);
    return fn(lo * xm) * lo * m * xm / x;
  };

  const double near = std::abs(mapped(1e-12));
  const double far = std::abs(mapped(1e-6));
  if (!std::isfinite(near) || near > 1e3 * far + 1e3 * std::numeric_limits<double>::min()) {
    throw Error(ErrorKind::Divergence, "mapped tail integrand is unbounded near x = 0");
  }
  return integrate(mapped, 0.0, 1.0, spec);
}

// ---------------------------------------------------------------------------
// Runge-Kutta (Dormand-Prince 5(4)).

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct OdeSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_steps = 1'000'000;
  double max_step = std::numeric_limits<double>::infinity();
  double t_end = std::numeric_limits<double>::infinity();
  /// Integration stops where this crosses from positive to <= 0.
  std::function<double(double, const State<N>&)> stop_predicate;
  /// Optional state-dependent cap on the step size (applied on top of max_step).
  std::function<double(double, const State<N>&)> step_cap;
  double initial_step = 0.0;  // 0 picks a default
};

enum class OdeStatus { EndReached, Event, MaxSteps, StepUnderflow };

template <std::size_t N>
struct Trajectory {
  std::vector<double> t;
  std::vector<State<N>> y;
  OdeStatus status = OdeStatus::EndReached;
  std::optional<double> event_time;
};

namespace detail {

template <std::size_t N, class Rhs>
bool dopri_step(Rhs& rhs, double t, const State<N>& y, double h, State<N>& y_out, State<N>& err) {
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  State<N> k1, k2, k3, k4, k5, k6, k7, tmp;
  k1 = rhs(t, y);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  k2 = rhs(t + h / 5.0, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  k3 = rhs(t + 3.0 * h / 10.0, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  k4 = rhs(t + 4.0 * h / 5.0, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  k5 = rhs(t + 8.0 * h / 9.0, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  k6 = rhs(t + h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    y_out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  k7 = rhs(t + h, y_out);
  bool finite = true;
  for (std::size_t i = 0; i < N; ++i) {
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    finite = finite && std::isfinite(y_out[i]) && std::isfinite(err[i]);
  }
  return finite;
}

}  // namespace detail

/// Adaptive Dormand-Prince integration from (t0, y0).
///
/// Every accepted step is recorded. When spec.stop_predicate changes sign
/// over a step, the crossing is located by bisection on the step length and
/// the located state closes the trajectory. A singular right-hand side shows
/// up as StepUnderflow with the trajectory holding the last valid state.
template <std::size_t N, class Rhs>
Trajectory<N> ode_solve(Rhs&& rhs, const State<N>& y0, double t0, const OdeSpec<N>& spec) {
  Trajectory<N> out;
  out.t.push_back(t0);
  out.y.push_back(y0);

  double t = t0;
  State<N> y = y0;
  double h = spec.initial_step > 0.0 ? spec.initial_step : 1e-4;
  h = std::min(h, spec.max_step);

  auto cap_for = [&](double tt, const State<N>& yy) {
    double cap = spec.max_step;
    if (spec.step_cap) cap = std::min(cap, spec.step_cap(tt, yy));
    if (std::isfinite(spec.t_end)) cap = std::min(cap, spec.t_end - tt);
    return cap;
  };
  auto predicate = [&](double tt, const State<N>& yy) {
    return spec.stop_predicate ? spec.stop_predicate(tt, yy) : 1.0;
  };

  double g_prev = predicate(t, y);
  State<N> y_new, err;
  for (std::size_t step = 0; step < spec.max_steps; ++step) {
    if (t >= spec.t_end) {
      out.status = OdeStatus::EndReached;
      return out;
    }
    h = std::min(h, cap_for(t, y));
    const double h_min = std::max(4.0 * std::numeric_limits<double>::epsilon() * std::abs(t),
                                  std::numeric_limits<double>::min());
    if (!(h > h_min)) {
      out.status = OdeStatus::StepUnderflow;
      return out;
    }

    const bool finite = detail::dopri_step<N>(rhs, t, y, h, y_new, err);
    double norm = 0.0;
    if (finite) {
      for (std::size_t i = 0; i < N; ++i) {
        const double sc = spec.abs_tol + spec.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        norm = std::max(norm, std::abs(err[i]) / sc);
      }
    }
    if (!finite || norm > 1.0) {
      const double shrink = finite ? std::clamp(0.9 * std::pow(norm, -0.2), 0.1, 0.9) : 0.25;
      h *= shrink;
      continue;
    }

    const double g_new = predicate(t + h, y_new);
    if (g_prev > 0.0 && g_new <= 0.0) {
      // Bisect on the step length from the last accepted state.
      double lo = 0.0, hi = h;
      State<N> y_hi = y_new, y_try, err_try;
      while (hi - lo > spec.abs_tol) {
        const double mid = 0.5 * (lo + hi);
        if (!(lo < mid && mid < hi)) break;
        detail::dopri_step<N>(rhs, t, y, mid, y_try, err_try);
        if (predicate(t + mid, y_try) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
          y_hi = y_try;
        }
      }
      out.t.push_back(t + hi);
      out.y.push_back(y_hi);
      out.status = OdeStatus::Event;
      out.event_time = t + hi;
      return out;
    }

    t += h;
    y = y_new;
    g_prev = g_new;
    out.t.push_back(t);
    out.y.push_back(y);

    const double grow = norm > 0.0 ? std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0) : 5.0;
    h *= grow;
  }
  out.status = OdeStatus::MaxSteps;
  return out;
}

// ---------------------------------------------------------------------------
// Finite differences.

struct Derivative {
  double value;
  double error;  // |last two diagonal entries| of the extrapolation table
};

namespace detail {

// Neville table on a sequence of step halvings; `order_step` is the power of
// h removed at each column (2 for central, 1 for one-sided differences).
template <class Est>
Derivative richardson(Est&& estimate, double h0, int levels, int order_step, double noise_floor) {
  std::vector<std::vector<double>> table(levels);
  double h = h0;
  for (int i = 0; i < levels; ++i, h *= 0.5) {
    table[i].resize(i + 1);
    table[i][0] = estimate(h);
    double factor = 1.0;
    for (int j = 1; j <= i; ++j) {
      factor *= std::pow(2.0, order_step);
      table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
    }
  }
  const double best = table[levels - 1][levels - 1];
  const double err = std::abs(best - table[levels - 2][levels - 2]);
  const double prev_err = std::abs(table[levels - 2][levels - 2] - table[levels - 3][levels - 3]);
  // The table contracts when successive diagonal entries approach each other.
  // Differences at roundoff level are accepted as converged.
  if (err > noise_floor && err > prev_err && err > 1e-4 * std::abs(best)) {
    throw Error(ErrorKind::NoiseDominated, "Richardson table failed to contract");
  }
  return {best, err};
}

}  // namespace detail

inline double default_step(double x) { return 1e-3 * std::max(1.0, std::abs(x)); }

/// Central difference f'(x) with 4-level Richardson extrapolation.
template <class F>
Derivative central_diff(F&& fn, double x, double h0) {
  if (!(h0 > 0.0)) throw Error(ErrorKind::DomainError, "central_diff needs h0 > 0");
  const double fx = std::abs(fn(x));
  const double noise = 1e4 * std::numeric_limits<double>::epsilon() * std::max(fx, 1e-300) / h0 * 8.0;
  return detail::richardson([&](double h) { return (fn(x + h) - fn(x - h)) / (2.0 * h); }, h0, 4, 2,
                            noise);
}

/// One-sided variant for points on the edge of a function's domain.
/// direction = -1 samples only x - k*h.
template <class F>
Derivative one_sided_diff(F&& fn, double x, double h0, int direction) {
  if (!(h0 > 0.0)) throw Error(ErrorKind::DomainError, "one_sided_diff needs h0 > 0");
  const double s = direction < 0 ? -1.0 : 1.0;
  const double fx = fn(x);
  const double noise = 1e4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(fx), 1e-300) / h0 * 16.0;
  // Second-order one-sided stencil; Richardson then removes h^2, h^3, ...
  auto est = [&](double h) {
    return s * (-3.0 * fx + 4.0 * fn(x + s * h) - fn(x + 2.0 * s * h)) / (2.0 * h);
  };
  std::vector<std::vector<double>> table(5);
  double h = h0;
  for (int i = 0; i < 5; ++i, h *= 0.5) {
    table[i].resize(i + 1);
    table[i][0] = est(h);
    for (int j = 1; j <= i; ++j) {
      const double factor = std::pow(2.0, j + 1);
      table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
    }
  }
  const double best = table[4][4];
  const double err = std::abs(best - table[3][3]);
  if (err > noise && err > 1e-4 * std::abs(best) && err > std::abs(table[3][3] - table[2][2])) {
    throw Error(ErrorKind::NoiseDominated, "one-sided Richardson table failed to contract");
  }
  return {best, err};
}

// ---------------------------------------------------------------------------
// Root finding.

/// Solves fn(x) = target on [lo, hi] where fn is monotone, using Newton steps
/// with bisection safeguarding. dfn is the derivative of fn. Convergence is
/// declared on steps below rel_tol * max(1, |x|).
template <class F, class DF>
double solve_monotone(F&& fn, DF&& dfn, double target, double lo, double hi, double rel_tol = 1e-15) {
  double flo = fn(lo) - target;
  double fhi = fn(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    // An endpoint that already sits on the root up to rounding.
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(target));
    if (std::abs(flo) <= noise || std::abs(fhi) <= noise) return std::abs(flo) <= std::abs(fhi) ? lo : hi;
    throw Error(ErrorKind::RootNotBracketed, "target " + std::to_string(target) + " not bracketed on [" +
                                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  const bool increasing = fhi > 0.0;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double fx = fn(x) - target;
    if (fx == 0.0) return x;
    if ((fx > 0.0) == increasing) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = dfn(x);
    double next = x - fx / d;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      // Geometric bisection keeps progress on brackets spanning many decades.
      next = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    const double scale = std::max(1.0, std::abs(x));
    if (std::abs(next - x) <= rel_tol * scale || hi - lo <= rel_tol * scale) return next;
    x = next;
  }
  throw Error(ErrorKind::NonConvergence, "root iteration did not converge");
}

}  // namespace capmono::numerics

#endif  // CAPMONO_NUMERICS_HPP
