#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "capmono/geometry.hpp"

namespace {

using namespace capmono;
constexpr double kPi = std::numbers::pi;

ModelManifold make(int n, WarpProfile w, double omega = 1.0) { return ModelManifold(n, std::move(w), omega); }

TEST(Ricci, EuclideanFlat) {
  const auto m = make(3, profiles::euclidean());
  for (double r : {0.1, 1.0, 7.0}) {
    const auto ev = ricci_eigenvalues(m, r);
    EXPECT_EQ(ev.radial, 0.0);
    EXPECT_EQ(ev.tangential, 0.0);
  }
}

TEST(Ricci, Cone) {
  const auto ev = ricci_eigenvalues(make(3, profiles::cone(0.5)), 2.0);
  EXPECT_EQ(ev.radial, 0.0);
  EXPECT_NEAR(ev.tangential, 0.75, 1e-15);
}

TEST(Ricci, Tanh) {
  const auto ev = ricci_eigenvalues(make(3, profiles::tanh_profile()), 1.0);
  // 4 sech^2(1) and 1 + 3 sech^2(1).
  const double s = 1.0 / (std::cosh(1.0) * std::cosh(1.0));
  EXPECT_NEAR(ev.radial, 4.0 * s, 1e-14);
  EXPECT_NEAR(ev.tangential, 1.0 + 3.0 * s, 1e-14);
  EXPECT_NEAR(ev.radial, 1.6798973664561043, 1e-13);
  EXPECT_NEAR(ev.tangential, 2.2599230248420782, 1e-13);
  // Four-digit rounding of the radial value lands at 1.6799.
  EXPECT_NEAR(ev.radial, 1.6800, 2e-4);
  EXPECT_NEAR(ev.tangential, 2.2600, 1e-4);
}

TEST(Ricci, OutsideDomain) {
  const auto m = make(3, profiles::power(0.6));
  try {
    ricci_eigenvalues(m, 0.1);
    FAIL() << "expected DomainError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}

TEST(Manifold, Invariants) {
  EXPECT_THROW(make(2, profiles::euclidean()), Error);
  EXPECT_THROW(make(3, profiles::euclidean(), 0.0), Error);
  EXPECT_THROW(make(3, profiles::euclidean(), 1.5), Error);
  EXPECT_THROW(profiles::cone(0.0), Error);
  EXPECT_THROW(profiles::power(1.0), Error);
  EXPECT_EQ(make(3, profiles::cone(0.5)).id(), "cone:alpha=0.5:n=3");
  EXPECT_EQ(make(4, profiles::cone(1.0), 0.5).id(), "cone:alpha=1:n=4:omega=0.5");
}

TEST(BishopGromov, EuclideanBall) {
  const auto bg = bishop_gromov(make(3, profiles::euclidean()), 2.0);
  EXPECT_NEAR(bg.volume_ratio, 1.0, 1e-14);
  EXPECT_NEAR(bg.area_ratio, 1.0, 1e-14);
  EXPECT_NEAR(bg.area, 16.0 * kPi, 1e-12);
  EXPECT_NEAR(bg.volume, 32.0 * kPi / 3.0, 1e-12);
}

TEST(BishopGromov, ConeRatios) {
  const auto m = make(3, profiles::cone(0.5));
  for (double r : {0.01, 1.0, 50.0}) {
    const auto bg = bishop_gromov(m, r);
    EXPECT_NEAR(bg.volume_ratio, 0.25, 1e-14);
    EXPECT_NEAR(bg.area_ratio, 0.25, 1e-14);
  }
}

TEST(BishopGromov, SmoothedConeDecreasing) {
  const auto m = make(3, profiles::smoothed_cone(0.5));
  const double t1 = bishop_gromov(m, 1.0).volume_ratio;
  const double t10 = bishop_gromov(m, 10.0).volume_ratio;
  EXPECT_GT(t1, t10);
  EXPECT_GT(t10, 0.25);
  // Frozen: 3 int_0^r f^2 / r^3 with f = r/2 + (1 - e^{-r})/2.
  EXPECT_NEAR(t1, 0.72970675405776069, 1e-13);
}

TEST(BishopGromov, NotOriginClosed) {
  const auto m = make(3, profiles::cylinder_end());
  try {
    bishop_gromov(m, 1.0);
    FAIL() << "expected DomainError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}

TEST(BishopGromov, MonotoneAndLimits) {
  for (int n : {3, 4, 5}) {
    for (auto w : {profiles::euclidean(), profiles::cone(0.3), profiles::smoothed_cone(0.7), profiles::tanh_profile()}) {
      const auto m = make(n, w);
      double prev_v = 1e300, prev_a = 1e300;
      for (int i = 0; i <= 80; ++i) {
        const double r = 1e-4 * std::pow(1e8, i / 80.0);
        const auto bg = bishop_gromov(m, r);
        EXPECT_LE(bg.volume_ratio, prev_v + 1e-10) << m.id() << " r=" << r;
        EXPECT_LE(bg.area_ratio, prev_a + 1e-10) << m.id() << " r=" << r;
        prev_v = bg.volume_ratio;
        prev_a = bg.area_ratio;
      }
      if (m.warp().smooth_origin) {
        const auto bg = bishop_gromov(m, 1e-4);
        EXPECT_NEAR(bg.volume_ratio, 1.0, 1e-3) << m.id();
        EXPECT_NEAR(bg.area_ratio, 1.0, 1e-3) << m.id();
      }
      EXPECT_NEAR(avr_from_areas(m, 1e4), avr(m), 1e-3) << m.id();
    }
  }
}

TEST(Avr, Examples) {
  EXPECT_EQ(avr(make(3, profiles::euclidean())), 1.0);
  EXPECT_NEAR(avr(make(3, profiles::cone(0.5))), 0.25, 1e-15);
  EXPECT_NEAR(avr(make(4, profiles::cone(1.0), 0.5)), 0.5, 1e-15);
  EXPECT_EQ(avr(make(3, profiles::tanh_profile())), 0.0);
  EXPECT_EQ(avr(make(3, profiles::power(0.6))), 0.0);
  const auto sc = make(3, profiles::smoothed_cone(0.7));
  EXPECT_NEAR(avr_from_areas(sc), avr(sc), 1e-3);
}

TEST(Parabolicity, Examples) {
  EXPECT_EQ(classify_parabolicity(make(3, profiles::euclidean()), 1.0), Parabolicity::Nonparabolic);
  EXPECT_EQ(classify_parabolicity(make(3, profiles::tanh_profile()), 1.0), Parabolicity::Parabolic);
  EXPECT_EQ(classify_parabolicity(make(3, profiles::power(0.6)), 1.0), Parabolicity::Nonparabolic);
  EXPECT_EQ(classify_parabolicity(make(3, profiles::cylinder_end()), 1.0), Parabolicity::Parabolic);
  EXPECT_EQ(classify_parabolicity(make(5, profiles::smoothed_cone(0.3)), 1.0), Parabolicity::Nonparabolic);
}

TEST(Parabolicity, PowerBelowThreshold) {
  // gamma (n-1) = 0.8 < 1: the radial integral diverges.
  EXPECT_EQ(classify_parabolicity(make(3, profiles::power(0.4)), 1.0), Parabolicity::Parabolic);
}

TEST(Admissibility, ShippedFamilies) {
  for (int n : {3, 4, 5}) {
    std::vector<WarpProfile> ws{profiles::euclidean(),         profiles::cone(0.3),      profiles::cone(0.9),
                                profiles::smoothed_cone(0.3), profiles::smoothed_cone(0.7), profiles::tanh_profile(),
                                profiles::cylinder_end(),     profiles::power(0.6)};
    for (const auto& w : ws) {
      const auto m = make(n, w);
      const auto [lo, hi] = admissibility_window(m);
      EXPECT_GE(min_ricci(m, lo, hi, 500), -1e-12) << m.id();
    }
  }
}

TEST(Profiles, TailBound) {
  for (auto w : {profiles::smoothed_cone(0.3), profiles::smoothed_cone(0.7), profiles::cone(0.5)}) {
    for (double r = w.tail_radius; r < 1e6; r *= 3.0) EXPECT_LE(std::abs(w.f(r) / r - w.slope), w.tail_bound) << w.family;
  }
}

}  // namespace
