#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dwkin/errors.hpp"
#include "dwkin/extraction.hpp"
#include "support.hpp"

using namespace dwkin;
using namespace dwkin::testing;

namespace {

std::vector<double> step_profile(std::size_t cells, std::size_t j) {
  std::vector<double> p(cells, -1.0);
  for (std::size_t i = 0; i < j; ++i) p[i] = 1.0;
  return p;
}

// Ideal pulse response sampled at dt: rise with rate r for tau, then free decay.
struct Analytic {
  std::vector<double> t_s, x_m, v;
};
Analytic analytic_pulse(double v_inf, double r, double d1, double tau, double settle,
                        double dt = 0.01) {
  Analytic a;
  const auto n = static_cast<std::size_t>(std::llround((tau + settle) / dt)) + 1;
  const double v_off = v_inf * -std::expm1(-r * tau);
  const double x_off = v_inf * tau - v_off / r;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    double x, v;
    if (t <= tau) {
      v = v_inf * -std::expm1(-r * t);
      x = v_inf * t - v / r;
    } else {
      v = v_off * std::exp(-d1 * (t - tau));
      x = x_off + v_off * -std::expm1(-d1 * (t - tau)) / d1;
    }
    a.t_s.push_back(t * 1e-9);
    a.x_m.push_back(x * 1e-9);
    a.v.push_back(v);
  }
  return a;
}

}  // namespace

TEST(WallCentroid, StepProfile) {
  for (std::size_t j : {1u, 7u, 63u}) {
    EXPECT_EQ(wall_centroid(step_profile(64, j)), static_cast<double>(j));
    EXPECT_DOUBLE_EQ(wall_center_m(step_profile(64, j), 2e-9), (j - 0.5) * 2e-9);
  }
  EXPECT_THROW(wall_centroid(std::vector<double>(10, 1.0)), NumericalError);
  EXPECT_THROW(wall_centroid(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(WallCentroid, TanhCentreWithinHalfCell) {
  Rng rng(kSeed);
  for (int i = 0; i < 200; ++i) {
    const double c = uniform(rng, 100e-9, 400e-9);
    const auto t = tanh_table({c}, {}, 500, 1e-9, uniform(rng, 2e-9, 10e-9));
    EXPECT_NEAR(wall_center_m(t.profile[0], 1e-9), c, 0.5e-9);
  }
}

TEST(ExtractPosition, TranslationEquivariant) {
  const auto t = tanh_table({200e-9, 230.3e-9}, {}, 400, 1e-9, 5e-9);
  auto moved = t;
  moved.profile[1].insert(moved.profile[1].begin(), 1.0);
  moved.profile[1].pop_back();
  EXPECT_NEAR(wall_centroid(moved.profile[1]), wall_centroid(t.profile[1]) + 1.0, 1e-12);
  EXPECT_NEAR(extract_position(moved)[1] - extract_position(t)[1], 1e-9, 1e-20);
}

TEST(ExtractPosition, RezeroedAndShiftAdded) {
  const std::vector<double> centers{150e-9, 160e-9, 175.5e-9};
  auto t = tanh_table(centers, {}, 400, 1e-9, 4e-9);
  const auto plain = extract_position(t);
  EXPECT_EQ(plain[0], 0.0);
  for (std::size_t i = 0; i < centers.size(); ++i)
    EXPECT_NEAR(plain[i], centers[i] - centers[0], 0.5e-9);
  t.shift_m = {5e-9, 5e-9, 5e-9};
  const auto with_shift = extract_position(t);
  for (std::size_t i = 0; i < centers.size(); ++i)
    EXPECT_NEAR(with_shift[i] - plain[i], 5e-9, 1e-18);
}

TEST(ExtractPosition, MovingWindow) {
  // Absolute centre X_i, window shift s_i, in-window centre X_i - s_i.
  std::vector<double> abs_c, shift, in_window;
  for (int i = 0; i < 50; ++i) {
    abs_c.push_back(200e-9 + 3.7e-9 * i);
    shift.push_back(i < 10 ? 0.0 : 2e-9 * (i - 9));
    in_window.push_back(abs_c.back() - shift.back());
  }
  const auto pos = extract_position(tanh_table(in_window, shift, 500, 1e-9, 5e-9));
  for (std::size_t i = 0; i < abs_c.size(); ++i)
    EXPECT_NEAR(pos[i], abs_c[i] - abs_c[0], 0.5e-9);
}

TEST(ExtractPosition, RowWithoutWallIsError) {
  auto t = tanh_table({200e-9, 200e-9}, {}, 400, 1e-9, 5e-9);
  t.profile[1].assign(400, 1.0);
  EXPECT_THROW(extract_position(t), NumericalError);
}

TEST(LaggedVelocity, RampAndInvalidHead) {
  std::vector<double> t, x;
  for (int i = 0; i < 50; ++i) {
    t.push_back(i * 1e-11);
    x.push_back(100.0 * i * 1e-11);
  }
  const auto v = lagged_velocity(x, t, 2);
  EXPECT_TRUE(std::isnan(v[0]));
  EXPECT_TRUE(std::isnan(v[1]));
  for (std::size_t i = 2; i < v.size(); ++i) EXPECT_NEAR(v[i], 100.0, 1e-9);
  EXPECT_THROW(lagged_velocity(std::vector<double>{0.0, 1.0}, std::vector<double>{0, 1}, 2),
               std::invalid_argument);
  EXPECT_THROW(lagged_velocity(x, t, 0), std::invalid_argument);
}

TEST(ExtractVelocity, LinearRampIsExact) {
  std::vector<double> t, x;
  for (int i = 0; i < 1000; ++i) {
    t.push_back(i * 1e-11);
    x.push_back(100.0 * i * 1e-11);
  }
  const auto v = extract_velocity(x, t);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], 100.0, 1e-9);
  const std::vector<double> still(1000, 3e-7);
  for (double s : extract_velocity(still, t)) EXPECT_EQ(s, 0.0);
}

TEST(GaussianSmooth, KernelShape) {
  // Impulse response: symmetric-ish Gaussian with sigma = window / 5.
  std::vector<double> impulse(401, 0.0);
  impulse[200] = 1.0;
  const auto s = gaussian_smooth(impulse, 150);
  const double peak = s[200];
  EXPECT_NEAR(s[230] / peak, std::exp(-0.5), 1e-12);
  EXPECT_NEAR(s[170] / peak, std::exp(-0.5), 1e-12);
  EXPECT_EQ(s[200 - 76], 0.0);  // even window: 75 samples before, 74 after
  EXPECT_GT(s[200 - 74], 0.0);
  EXPECT_EQ(gaussian_smooth(impulse, 1), impulse);
}

TEST(GaussianSmooth, SkipsNaN) {
  std::vector<double> v(20, 2.0);
  v[0] = v[1] = std::nan("");
  for (double s : gaussian_smooth(v, 5)) EXPECT_DOUBLE_EQ(s, 2.0);
}

TEST(ExtractVelocity, ExponentialApproachWithinOnePercent) {
  const double v_inf = 150.0, r = 0.2;
  const auto a = analytic_pulse(v_inf, r, 0.2, 100.0, 0.0);
  const auto v = extract_velocity(a.x_m, a.t_s);
  for (std::size_t i = 300; i + 200 < v.size(); ++i) {
    const double t_mid = a.t_s[i] * 1e9 - 0.01;  // centre of the lag-2 difference
    EXPECT_NEAR(v[i], v_inf * -std::expm1(-r * t_mid), 0.01 * v_inf);
  }
}

TEST(ExtractFeatures, AnalyticRiseExactVelocities) {
  const double v_inf = 120.0, r = 0.25, d1 = 0.1;
  const auto a = analytic_pulse(v_inf, r, d1, 100.0, 150.0);
  TrialMeta meta{1e10, 100e-9, std::nullopt, "analytic"};
  const auto f = extract_features(a.x_m, a.v, a.t_s, meta);
  EXPECT_NEAR(f.time_constant_s, 1e-9 / r, 0.01e-9);
  EXPECT_LT(rel_err(f.max_vel_mps, v_inf), 1e-3);
  // drift starts one sample after the pulse ends
  EXPECT_LT(rel_err(f.drift_dist_m * 1e9, f.max_vel_mps / d1), 2e-3);
  EXPECT_TRUE(f.settled);
}

TEST(ExtractFeatures, UnsettledTraceFlagged) {
  const auto a = analytic_pulse(100.0, 0.5, 0.01, 20.0, 10.0);
  const auto f = extract_features(a.x_m, a.v, a.t_s, {1e10, 20e-9, std::nullopt, "slow"});
  EXPECT_FALSE(f.settled);
}

TEST(ExtractFeatures, Errors) {
  const auto a = analytic_pulse(100.0, 0.5, 0.2, 20.0, 10.0);
  EXPECT_THROW(extract_features(a.x_m, a.v, a.t_s, {1e10, 40e-9, std::nullopt, "x"}),
               NumericalError);
  EXPECT_THROW(extract_features(a.x_m, a.v, a.t_s, {0.0, 20e-9, std::nullopt, "x"}),
               std::invalid_argument);
  const std::vector<double> zeros(a.t_s.size(), 0.0);
  EXPECT_THROW(extract_features(zeros, zeros, a.t_s, {1e10, 20e-9, std::nullopt, "x"}),
               NumericalError);
}

TEST(MotionCsv, RoundTripKeepsNaNHead) {
  const auto t = tanh_table({100e-9, 101e-9, 102e-9, 104e-9}, {}, 200, 1e-9, 4e-9);
  const auto m = extract_motion(t);
  std::stringstream ss;
  write_motion_csv(ss, m, {"trial=abc", "J=1e10"});
  EXPECT_EQ(ss.str().rfind("# trial=abc\n", 0), 0u);
  const auto back = read_motion_csv(ss);
  EXPECT_EQ(back.time_s, m.time_s);
  EXPECT_EQ(back.position_m, m.position_m);
  ASSERT_EQ(back.velocity_mps.size(), 4u);
  EXPECT_TRUE(std::isnan(back.velocity_mps[1]));
  EXPECT_EQ(back.velocity_mps[3], m.velocity_mps[3]);
}

TEST(FeaturesCsv, RoundTrip) {
  const auto f = exact_features(round_trip_constants(), j_ladder(5));
  std::stringstream ss;
  write_features_csv(ss, f);
  const auto back = read_features_csv(ss);
  ASSERT_EQ(back.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(back[i].j, f[i].j);
    EXPECT_EQ(back[i].max_vel_mps, f[i].max_vel_mps);
    EXPECT_EQ(back[i].time_constant_s, f[i].time_constant_s);
    EXPECT_EQ(back[i].drift_dist_m, f[i].drift_dist_m);
  }
}
