#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "capmono/potential.hpp"

namespace {

using namespace capmono;

PotentialSolution solve(int n, WarpProfile w, double r0 = 1.0, double omega = 1.0) {
  return solve_exterior(ModelManifold(n, std::move(w), omega), r0);
}

double coth(double x) { return 1.0 / std::tanh(x); }

const CheckReport& find(const std::vector<CheckReport>& reports, const std::string& check) {
  for (const auto& r : reports) {
    if (r.check == check) return r;
  }
  throw std::runtime_error("missing report " + check);
}

TEST(SolveExterior, Euclidean) {
  const auto sol = solve(3, profiles::euclidean());
  EXPECT_TRUE(sol.nonparabolic());
  EXPECT_NEAR(sol.capacity(), 1.0, 1e-14);
  EXPECT_NEAR(sol.value(2.0), 0.5, 1e-15);
  EXPECT_NEAR(sol.value(1.0), 1.0, 1e-15);
  for (double r : {1.5, 10.0, 1e5}) EXPECT_NEAR(sol.value(r), 1.0 / r, 1e-15 / r);
}

TEST(SolveExterior, Cone) {
  const auto sol = solve(3, profiles::cone(0.5));
  EXPECT_NEAR(sol.boundary_tail(), 4.0, 1e-14);
  EXPECT_NEAR(sol.tail_integral_direct(1.0), 4.0, 1e-12);
  EXPECT_NEAR(sol.capacity(), 0.25, 1e-15);
  EXPECT_NEAR(sol.value(2.0), 0.5, 1e-15);
}

TEST(SolveExterior, TanhParabolic) {
  const auto sol = solve(3, profiles::tanh_profile());
  EXPECT_FALSE(sol.nonparabolic());
  const double exact = (2.0 - coth(2.0)) - (1.0 - coth(1.0));
  EXPECT_NEAR(sol.value(2.0), exact, 1e-13);
  EXPECT_NEAR(sol.value(2.0), 1.27573, 1e-5);
  EXPECT_EQ(sol.value(1.0), 0.0);
  EXPECT_THROW(sol.capacity(), Error);
}

TEST(SolveExterior, ConeCapacityScaling) {
  // Cap = omega_factor alpha^{n-1} r0^{n-2}.
  for (int n : {3, 4, 5}) {
    for (double alpha : {0.3, 0.5, 0.9}) {
      for (double r0 : {0.5, 1.0, 3.0}) {
        const auto sol = solve(n, profiles::cone(alpha), r0);
        const double expected = std::pow(alpha, n - 1) * std::pow(r0, n - 2);
        EXPECT_NEAR(sol.capacity(), expected, 1e-13 * expected) << n << " " << alpha << " " << r0;
      }
    }
  }
  const auto quotient = solve(4, profiles::cone(1.0), 1.0, 0.5);
  EXPECT_NEAR(quotient.capacity(), 0.5, 1e-15);
}

TEST(SolveExterior, ClosedFormTailMatchesQuadrature) {
  for (int n : {3, 4, 5}) {
    for (auto w : {profiles::smoothed_cone(0.3), profiles::smoothed_cone(0.7), profiles::power(0.6)}) {
      const auto sol = solve(n, w);
      for (double r : {1.0, 3.0, 50.0, 1e4}) {
        const double direct = sol.tail_integral_direct(r);
        // The quadrature carries a 1e-14 absolute floor.
        EXPECT_NEAR(sol.tail_integral(r), direct, std::max(1e-9 * direct, 1e-14)) << sol.manifold().id() << " r=" << r;
      }
    }
  }
}

TEST(SolveExterior, Invariants) {
  for (int n : {3, 4, 5}) {
    const auto sol = solve(n, profiles::smoothed_cone(0.5));
    EXPECT_NEAR(sol.value(1.0), 1.0, 1e-15);
    double prev = 1.0;
    for (double r = 1.1; r < 1e7; r *= 1.7) {
      const double v = sol.value(r);
      EXPECT_LT(v, prev);
      EXPECT_GT(v, 0.0);
      prev = v;
      const double g = std::pow(sol.manifold().f(r), 1 - n) / sol.boundary_tail();
      EXPECT_NEAR(sol.grad_mag(r), g, 1e-15 * g);
    }
  }
}

TEST(SolveExterior, LevelRadiusInvertsValue) {
  const auto sol = solve(4, profiles::smoothed_cone(0.3));
  for (double t : {1.0, 0.5, 1e-2, 1e-4}) {
    const double r = sol.level_radius(t);
    EXPECT_NEAR(sol.value(r), t, 1e-13 * t);
  }
  const auto psi = solve(3, profiles::tanh_profile());
  for (double s : {0.0, 0.7, 4.0}) EXPECT_NEAR(psi.value(psi.level_radius(s)), s, 1e-12);
}

TEST(Spheroid, Capacity) {
  EXPECT_NEAR(spheroid_exterior(1.0, 1.0).capacity, 1.0, 1e-15);
  const auto sp = spheroid_exterior(2.0, 1.0);
  const double c = std::sqrt(3.0);
  EXPECT_NEAR(sp.capacity, c / std::atanh(2.0 / c > 1.0 ? c / 2.0 : 2.0 / c), 1e-14);
  EXPECT_NEAR(sp.capacity, 2.0 * c / std::log((2.0 + c) / (2.0 - c)), 1e-13);
  EXPECT_NEAR(sp.capacity, 1.31518, 2e-5);
  EXPECT_NEAR(sp.capacity, 1.3151907222040548, 1e-13);
}

TEST(Spheroid, ValueInsideRange) {
  const auto sp = spheroid_exterior(2.0, 1.0);
  EXPECT_NEAR(sp.value(sp.xi0), 1.0, 1e-15);
  const double v = sp.value(2.0 * sp.xi0);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_LT(sp.value(1e6), 1e-5);
}

TEST(Spheroid, SphereLimit) {
  const double b = 1.0, a = 1.0 + 1e-6;
  EXPECT_NEAR(spheroid_exterior(a, b).capacity, a, 1e-5 * a);
  EXPECT_THROW(spheroid_exterior(1.0, 0.0), Error);
}

TEST(Asymptotics, Cone) {
  const auto reports = verify_asymptotics(solve(3, profiles::cone(0.5)));
  EXPECT_EQ(find(reports, "asymptotics.u_decay").max_violation, 0.0);
  EXPECT_LE(find(reports, "asymptotics.grad_l1").max_violation, 1e-14);
  EXPECT_LE(find(reports, "asymptotics.sphere_integral").max_violation, 1e-14);
}

TEST(Asymptotics, Euclidean) {
  for (const auto& r : verify_asymptotics(solve(3, profiles::euclidean()))) {
    EXPECT_NE(r.status, CheckStatus::Fail) << r.check;
    if (r.check == "asymptotics.u_decay" || r.check == "asymptotics.grad_l1") {
      EXPECT_LE(r.max_violation, 1e-12) << r.check;
    }
  }
}

TEST(Asymptotics, SmoothedCone) {
  const auto reports = verify_asymptotics(solve(3, profiles::smoothed_cone(0.7)));
  EXPECT_LE(find(reports, "asymptotics.u_decay").max_violation, 1e-3);
  for (const auto& r : reports) EXPECT_NE(r.status, CheckStatus::Fail) << r.check;
}

TEST(Asymptotics, ParabolicNotApplicable) {
  const auto reports = verify_asymptotics(solve(3, profiles::tanh_profile()));
  EXPECT_EQ(find(reports, "asymptotics.u_decay").status, CheckStatus::NotApplicable);
  EXPECT_EQ(find(reports, "asymptotics.grad_l1").status, CheckStatus::NotApplicable);
  EXPECT_EQ(find(reports, "asymptotics.sphere_integral").status, CheckStatus::NotApplicable);
}

}  // namespace
