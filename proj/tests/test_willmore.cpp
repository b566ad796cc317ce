#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "capmono/willmore.hpp"

namespace {

using namespace capmono;
constexpr double kPi = std::numbers::pi;

ModelManifold make(int n, WarpProfile w, double omega = 1.0) { return ModelManifold(n, std::move(w), omega); }

TEST(WillmoreEnergy, UnitSphere) {
  const auto m = make(3, profiles::euclidean());
  EXPECT_NEAR(willmore_energy(CoordinateSphere{&m, 1.0}, 3), 4.0 * kPi, 1e-13);
  EXPECT_NEAR(willmore_energy(CoordinateSphere{&m, 7.5}, 3), 4.0 * kPi, 1e-13);
}

TEST(WillmoreEnergy, ConeEquality) {
  const auto m = make(3, profiles::cone(0.5));
  for (double r : {0.5, 1.0, 20.0}) {
    EXPECT_NEAR(willmore_energy(CoordinateSphere{&m, r}, 3), kPi, 1e-14);
    const auto rep = check_willmore(m, CoordinateSphere{&m, r}, "r");
    EXPECT_EQ(rep.status, CheckStatus::Equality);
    EXPECT_EQ(rep.params.at("rigidity_residual"), 0.0);
  }
}

// Values from an arbitrary-precision quadrature of (k1 + k2)^2/4 over the
// meridian of the surface of revolution.
TEST(WillmoreEnergy, SpheroidAboveRoundSphere) {
  const double oracle[][2] = {{2.0, 15.451606644326558},
                              {1.5, 13.578741554246686},
                              {1.1, 12.62572218316532},
                              {1.01, 12.567032308717675}};
  for (const auto& [ratio, value] : oracle) {
    const double w = willmore_energy(spheroid_surface(ratio, 1.0), 3);
    EXPECT_NEAR(w, value, 1e-10 * value) << ratio;
    EXPECT_GT(w, 4.0 * kPi);
  }
  EXPECT_THROW(willmore_energy(spheroid_surface(2.0, 1.0), 4), Error);
}

TEST(WillmoreEnergy, SpheroidArea) {
  // Prolate spheroid area 2 pi b^2 (1 + a/(b e) asin e).
  const double a = 2.0, b = 1.0, e = std::sqrt(1.0 - b * b / (a * a));
  const double exact = 2.0 * kPi * b * b * (1.0 + a / (b * e) * std::asin(e));
  EXPECT_NEAR(surface_area(spheroid_surface(a, b)), exact, 1e-12 * exact);
}

TEST(CheckWillmore, TanhThresholdZero) {
  const auto m = make(3, profiles::tanh_profile());
  const auto rep = check_willmore(m, CoordinateSphere{&m, 2.0}, "r=2");
  EXPECT_EQ(rep.status, CheckStatus::Pass);
  EXPECT_EQ(rep.params.at("threshold"), 0.0);
  EXPECT_GT(rep.params.at("margin"), 0.0);
  EXPECT_EQ(rep.params.at("margin"), rep.params.at("energy"));
}

TEST(CheckWillmore, SmoothedConeStrict) {
  for (int n : {3, 4, 5}) {
    const auto m = make(n, profiles::smoothed_cone(0.5));
    const auto rep = check_willmore(m, CoordinateSphere{&m, 1.0}, "r=1");
    EXPECT_EQ(rep.status, CheckStatus::Pass) << n;
    EXPECT_GT(rep.params.at("margin"), 1e-3) << n;
  }
}

TEST(CheckWillmore, SpheroidNotEquality) {
  const auto m = make(3, profiles::euclidean());
  const auto rep = check_willmore(m, spheroid_surface(2.0, 1.0), "spheroid");
  EXPECT_EQ(rep.status, CheckStatus::Pass);
  EXPECT_GT(rep.params.at("margin"), 2.8);
}

TEST(CheckWillmore, EuclideanSphereEquality) {
  const auto m = make(4, profiles::euclidean());
  const auto rep = check_willmore(m, CoordinateSphere{&m, 3.0}, "r=3");
  EXPECT_EQ(rep.status, CheckStatus::Equality);
}

TEST(Kasue, EuclideanRoundSphere) {
  const auto sol = solve_exterior(make(3, profiles::euclidean()), 1.0);
  const auto k = kasue_bounds(sol, 1.0);
  EXPECT_NEAR(k.bound * k.weight, 8.0 * kPi, 1e-12);
  EXPECT_NEAR(k.bound, 2.0, 1e-13);
  EXPECT_NEAR(k.sup_h, 2.0, 1e-15);
  EXPECT_LE(k.identity_residual, 1e-10 * 8.0 * kPi);
}

TEST(Kasue, CylinderRigid) {
  const auto sol = solve_exterior(make(3, profiles::cylinder_end()), 1.0);
  for (double beta : {0.5, 1.0, 2.0}) {
    const auto k = kasue_bounds(sol, beta);
    EXPECT_EQ(k.bound, 0.0);
    EXPECT_EQ(k.sup_h, 0.0);
  }
}

TEST(Kasue, TanhClosedForm) {
  const auto sol = solve_exterior(make(3, profiles::tanh_profile()), 1.0);
  const auto k = kasue_bounds(sol, 2.0);
  const double exact = 2.0 / (std::cosh(1.0) * std::cosh(1.0) * std::tanh(1.0));
  EXPECT_NEAR(exact, 1.1028822590871328, 1e-15);
  EXPECT_NEAR(k.sup_h, exact, 1e-14);
  EXPECT_NEAR(k.bound, exact, 1e-8);
  // Five-digit rounding gives 1.10288.
  EXPECT_NEAR(k.bound, 1.10290, 3e-5);
}

TEST(Kasue, IdentityAcrossModels) {
  for (int n : {3, 4, 5}) {
    for (auto w : {profiles::smoothed_cone(0.3), profiles::smoothed_cone(0.7), profiles::power(0.6),
                   profiles::cone(0.5)}) {
      const auto sol = solve_exterior(make(n, w), 1.0);
      for (double beta : {beta_threshold(n), 1.0, 3.0}) {
        const auto k = kasue_bounds(sol, beta);
        EXPECT_LE(k.identity_residual, 1e-10 * std::abs(k.bound * k.weight)) << sol.manifold().id() << " " << beta;
        EXPECT_GT(k.bound, 0.0);
        EXPECT_LE(k.bound, k.sup_h * (1.0 + 1e-10));
      }
    }
  }
}

TEST(Kasue, BelowThreshold) {
  const auto sol = solve_exterior(make(4, profiles::euclidean()), 1.0);
  EXPECT_THROW(kasue_bounds(sol, 0.5), Error);
}

TEST(DerivedConstants, Examples) {
  const auto e = derived_constants(make(3, profiles::euclidean()));
  EXPECT_NEAR(*e.iso_const, 36.0 * kPi, 1e-12);
  EXPECT_NEAR(*e.iso_const, 113.097, 1e-3);
  EXPECT_NEAR(*e.sobolev_const, 4.83598, 1e-5);
  EXPECT_NEAR(*derived_constants(make(3, profiles::cone(0.5))).iso_const, 9.0 * kPi, 1e-13);
  const auto q = derived_constants(make(4, profiles::cone(1.0), 0.5));
  EXPECT_NEAR(q.ale_infimum, kPi * kPi, 1e-13);
  EXPECT_FALSE(q.iso_const.has_value());
  try {
    iso_constant(make(4, profiles::euclidean()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}

TEST(DerivedConstants, ConeBallIsoperimetricRatio) {
  for (double alpha : {0.3, 0.5, 0.9}) {
    const auto m = make(3, profiles::cone(alpha));
    for (double r : {0.5, 4.0}) {
      const auto bg = bishop_gromov(m, r);
      const double ratio = std::pow(bg.area, 3) / (36.0 * kPi * bg.volume * bg.volume);
      EXPECT_NEAR(ratio, alpha * alpha, 1e-12);
      EXPECT_NEAR(36.0 * kPi * ratio, iso_constant(m), 1e-10);
    }
  }
}

}  // namespace
