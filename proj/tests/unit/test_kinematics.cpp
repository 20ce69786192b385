#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dwkin/kinematics.hpp"
#include "support.hpp"

using namespace dwkin;
using namespace dwkin::testing;

namespace {

ModelConstants linear_drive() {
  return ModelConstants::from_fit({0.0, 2e-8, 0.0, 0.0}, 0.1, 0.0);
}

const TrackGeometry kTrack{};

}  // namespace

TEST(DeriveK, HandArithmetic) {
  const auto k = derive_k({1, 1, 1, 1}, 1, 1);
  EXPECT_EQ(k, (QuarticCoeffs{1, 2, 2, 2, 1}));
}

TEST(DeriveK, NoCurrentDamping) {
  const auto k = derive_k({3, 5e-9, 7e-19, 2e-30}, 0.25, 0.0);
  EXPECT_EQ(k[0], 0.25 * 3);
  EXPECT_EQ(k[1], 0.25 * 5e-9);
  EXPECT_EQ(k[2], 0.25 * 7e-19);
  EXPECT_EQ(k[3], 0.25 * 2e-30);
  EXPECT_EQ(k[4], 0.0);
}

TEST(ModelConstants, RejectsInvalid) {
  const CubicCoeffs c{1, 1e-9, 0, 0};
  EXPECT_THROW(ModelConstants::from_fit(c, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(ModelConstants::from_fit(c, 0.1, -1e-12), std::invalid_argument);
  EXPECT_THROW(ModelConstants::from_fit(c, 0.1, 0.0, {}, 1.5), std::invalid_argument);
  EXPECT_THROW(ModelConstants::from_fit(c, 0.1, 0.0, {-1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(ModelConstants::from_fit({NAN, 0, 0, 0}, 0.1, 0.0), std::invalid_argument);
}

TEST(ModelConstants, ComponentsMustSatisfyIdentity) {
  const CubicCoeffs c{10, 4e-9, 1e-19, 1e-30};
  auto k = derive_k(c, 0.2, 3e-12);
  EXPECT_NO_THROW(ModelConstants::from_components(k, c, 0.2, 3e-12));
  k[2] = std::nextafter(k[2], 1.0);
  EXPECT_THROW(ModelConstants::from_components(k, c, 0.2, 3e-12), std::invalid_argument);
}

TEST(ModelConstants, DefaultRestitution) {
  EXPECT_EQ(linear_drive().restitution(), 0.25);
}

TEST(AccelCurrent, ZeroCurrentIsZero) {
  const auto mc = ModelConstants::from_fit({50, 1e-9, 0, 0}, 0.3, 1e-12);
  EXPECT_EQ(accel_current(0.0, mc), 0.0);
}

TEST(AccelCurrent, LinearDriveHandValue) {
  EXPECT_NEAR(accel_current(1e10, linear_drive()), 20.0, 1e-12);
}

TEST(AccelCurrent, MatchesIndependentPolynomial) {
  Rng rng(kSeed);
  for (int i = 0; i < 200; ++i) {
    const auto mc = random_constants(rng);
    const double j = uniform(rng, -8e10, 8e10);
    EXPECT_NEAR(accel_current(j, mc), poly_accel(mc.k(), j),
                1e-13 * std::abs(poly_accel(mc.k(), j)));
  }
}

TEST(AccelCurrent, OddExtensionIsExact) {
  Rng rng(kSeed);
  for (int i = 0; i < 200; ++i) {
    const auto mc = random_constants(rng);
    const double j = uniform(rng, 1e8, 8e10);
    EXPECT_EQ(accel_current(-j, mc), -accel_current(j, mc));
  }
}

TEST(AccelDamping, Examples) {
  const auto mc = ModelConstants::from_fit({0, 1e-9, 0, 0}, 0.05, 1e-12);
  EXPECT_EQ(accel_damping(0.0, 3e10, mc), 0.0);
  EXPECT_DOUBLE_EQ(accel_damping(100.0, 0.0, mc), -5.0);
  EXPECT_LT(accel_damping(10.0, -4e10, mc), 0.0);
  EXPECT_LT(accel_damping(10.0, 4e10, mc), 0.0);
}

TEST(AccelPinning, Regimes) {
  const auto mc = linear_drive().with_pinning({1e10, 5.0});
  const double a_small = accel_current(5e9, mc);
  EXPECT_EQ(accel_pinning(5e9, 1.0, a_small, mc), -a_small);
  EXPECT_EQ(a_small + accel_pinning(5e9, 1.0, a_small, mc), 0.0);
  EXPECT_EQ(accel_pinning(2e10, 1.0, accel_current(2e10, mc), mc), 0.0);
  EXPECT_EQ(accel_pinning(5e9, 6.0, a_small, mc), 0.0);
  const auto free = linear_drive();
  EXPECT_EQ(accel_pinning(5e9, 0.0, accel_current(5e9, free), free), 0.0);
}

TEST(TotalAccel, Examples) {
  const auto mc = linear_drive();
  EXPECT_EQ(total_accel(0.0, 0.0, mc), 0.0);
  EXPECT_NEAR(total_accel(1e10, 0.0, mc), 20.0, 1e-12);
  const double v_inf = *terminal_velocity(1e10, mc);
  EXPECT_NEAR(total_accel(1e10, v_inf, mc), 0.0, 1e-12);
}

TEST(TerminalVelocity, EqualsCubic) {
  Rng rng(kSeed);
  for (int i = 0; i < 500; ++i) {
    const auto mc = random_constants(rng);
    const double j = uniform(rng, -8e10, 8e10);
    const auto& c = mc.c();
    const double a = std::abs(j);
    const double cubic = std::copysign(c[0] + a * (c[1] + a * (c[2] + a * c[3])), j);
    EXPECT_NEAR(*terminal_velocity(j, mc), cubic, 1e-12 * std::abs(cubic));
    EXPECT_EQ(*terminal_velocity(-j, mc), -*terminal_velocity(j, mc));
  }
}

TEST(TerminalVelocity, InvertedCubicTarget) {
  const auto mc = ModelConstants::from_fit({5, 3e-9, 2e-20, 1e-31}, 0.2, 5e-12);
  // bisection for J with cubic(J) = 100 m/s
  double lo = 0.0, hi = 1e11;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const auto& c = mc.c();
    (c[0] + mid * (c[1] + mid * (c[2] + mid * c[3])) < 100.0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(*terminal_velocity(lo, mc), 100.0, 1e-9);
}

TEST(TerminalVelocity, PinnedRegimeHasNoValue) {
  const auto mc = linear_drive().with_pinning({1e10, 5.0});
  EXPECT_FALSE(terminal_velocity(5e9, mc).has_value());
  EXPECT_TRUE(terminal_velocity(1e10, mc).has_value());
}

TEST(StepExact, FixedPoint) {
  const auto mc = ModelConstants::from_fit({10, 5e-9, 0, 0}, 0.2, 0.0);
  const double v_inf = *terminal_velocity(2e10, mc);
  const TrackGeometry long_geom = long_track();
  const DwState s{0.5e-3, v_inf};
  const auto next = step_exact(s, 2e10, 3.0, mc, long_geom);
  EXPECT_EQ(next.v_mps, v_inf);
  EXPECT_NEAR(next.x_m, 0.5e-3 + v_inf * 3.0 * 1e-9, 1e-18);
}

TEST(StepExact, FreeDecayAndDrift) {
  const auto mc = ModelConstants::from_fit({10, 5e-9, 0, 0}, 0.25, 1e-12);
  const TrackGeometry geom = long_track();
  const DwState s{0.5e-3, 80.0};
  const auto next = step_exact(s, 0.0, 4.0, mc, geom);
  EXPECT_NEAR(next.v_mps, 80.0 * std::exp(-1.0), 1e-12);
  const auto far = step_exact(s, 0.0, 400.0, mc, geom);
  EXPECT_NEAR((far.x_m - s.x_m) * 1e9, 80.0 / 0.25, 1e-9);
}

TEST(StepExact, AgreesWithFineRk4) {
  Rng rng(kSeed);
  const TrackGeometry geom = long_track();
  for (int i = 0; i < 20; ++i) {
    const auto mc = random_constants(rng);
    const double j = uniform(rng, -6e10, 6e10);
    const double v0 = uniform(rng, -100, 100);
    const auto ref = fine_rk4(v0, j, 7.0, mc, 20000);
    const auto got = step_exact({0.5e-3, v0}, j, 7.0, mc, geom);
    EXPECT_NEAR(got.v_mps, ref.v, 1e-9 * (1 + std::abs(ref.v)));
    EXPECT_NEAR((got.x_m - 0.5e-3) * 1e9, ref.x_nm, 1e-6 * (1 + std::abs(ref.x_nm)));
  }
}

TEST(StepExact, RiseThenDecayShape) {
  const auto mc = ModelConstants::from_fit({10, 5e-9, 0, 0}, 0.2, 5e-12);
  const TrackGeometry geom = long_track();
  DwState s{0.5e-3, 0.0};
  double prev_v = 0.0;
  for (int i = 0; i < 200; ++i) {  // 20 ns on
    s = step_exact(s, 2e10, 0.1, mc, geom);
    EXPECT_GE(s.v_mps, prev_v);
    prev_v = s.v_mps;
  }
  const double x_off = s.x_m;
  for (int i = 0; i < 200; ++i) {  // 20 ns off
    s = step_exact(s, 0.0, 0.1, mc, geom);
    EXPECT_LE(s.v_mps, prev_v);
    EXPECT_GE(s.x_m, x_off);
    prev_v = s.v_mps;
  }
  EXPECT_LT(s.v_mps, 0.02 * *terminal_velocity(2e10, mc));
}

TEST(StepExact, RejectsNonPositiveDt) {
  const auto mc = linear_drive();
  EXPECT_THROW(step_exact({}, 1e10, 0.0, mc, kTrack), std::invalid_argument);
  EXPECT_THROW(step_euler({}, 1e10, -1.0, mc, kTrack), std::invalid_argument);
}

TEST(StepEuler, SingleStepFromRest) {
  const auto mc = linear_drive();
  const DwState s{250e-9, 0.0};
  const auto next = step_euler(s, 1e10, 1e-3, mc, kTrack);
  const double v = accel_current(1e10, mc) * 1e-3;
  EXPECT_EQ(next.v_mps, v);
  EXPECT_EQ(next.x_m, 250e-9 + v * 1e-3 * 1e-9);
}

TEST(StepEuler, ConvergesToExactOverPulse) {
  const auto mc = ModelConstants::from_fit({10, 5e-9, 1e-20, 0}, 0.2, 5e-12);
  const TrackGeometry geom = long_track();
  DwState e{0.5e-3, 0.0};
  for (int i = 0; i < 100000; ++i) e = step_euler(e, 2e10, 1e-3, mc, geom);
  const auto x = step_exact({0.5e-3, 0.0}, 2e10, 100.0, mc, geom);
  EXPECT_LT(rel_err(e.x_m - 0.5e-3, x.x_m - 0.5e-3), 1e-3);
}

TEST(Pinning, FreezesState) {
  const auto mc = linear_drive().with_pinning({1e10, 5.0});
  const DwState s{100e-9, 2.0};
  EXPECT_EQ(step_exact(s, 5e9, 1.0, mc, kTrack), s);
  EXPECT_EQ(step_euler(s, -5e9, 1.0, mc, kTrack), s);
  EXPECT_NE(step_exact(s, 2e10, 1.0, mc, kTrack), s);
}

TEST(ApplyBounce, Examples) {
  const auto left = apply_bounce({-1e-9, -50.0}, kTrack, 0.25);
  EXPECT_EQ(left.x_m, 0.0);
  EXPECT_EQ(left.v_mps, 12.5);
  const auto right = apply_bounce({kTrack.length_m + 1e-9, 40.0}, kTrack, 0.25);
  EXPECT_EQ(right.x_m, kTrack.length_m);
  EXPECT_EQ(right.v_mps, -10.0);
  const auto stick = apply_bounce({-1e-9, -50.0}, kTrack, 0.0);
  EXPECT_EQ(stick.v_mps, 0.0);
  const DwState inside{1e-7, 3.0};
  EXPECT_EQ(apply_bounce(inside, kTrack, 0.5), inside);
}

TEST(ApplyBounce, ElasticKeepsSpeedAtImpact) {
  const auto mc = ModelConstants::from_fit({0, 1e-9, 0, 0}, 1e-6, 0.0, {}, 1.0);
  const TrackGeometry short_track{20e-9, 50e-9, 1.2e-9};
  DwState s{10e-9, 300.0};
  for (int i = 0; i < 2000; ++i) {
    s = step_exact(s, 0.0, 0.01, mc, short_track);
    EXPECT_GE(s.x_m, 0.0);
    EXPECT_LE(s.x_m, short_track.length_m);
  }
  EXPECT_NEAR(std::abs(s.v_mps), 300.0, 300.0 * 1e-4);
}

TEST(Geometry, Validate) {
  EXPECT_NO_THROW(TrackGeometry{}.validate());
  EXPECT_THROW((TrackGeometry{0.0, 1e-9, 1e-9}).validate(), std::invalid_argument);
  EXPECT_DOUBLE_EQ(TrackGeometry{}.cross_section_m2(), 6e-17);
}
