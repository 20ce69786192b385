#include <gtest/gtest.h>

#include <cmath>

#include "dwkin/electrical.hpp"
#include "support.hpp"

using namespace dwkin;
using namespace dwkin::testing;

namespace {

const TrackGeometry kTrack{};

ElectricalParams params() { return ElectricalParams::for_track(kTrack); }

}  // namespace

TEST(MtjFractional, EndpointsAndMidpoint) {
  EXPECT_EQ(mtj_resistance_fractional(1.0, 1e3, 1e6), 1e3);
  EXPECT_EQ(mtj_resistance_fractional(0.0, 1e3, 1e6), 1e6);
  const double want = 2 * 1e3 * 1e6 / (1e3 + 1e6);
  EXPECT_LE(rel_err(mtj_resistance_fractional(0.5, 1e3, 1e6), want), 1e-12);
  EXPECT_NEAR(mtj_resistance_fractional(0.5, 1e3, 1e6), 1998.0, 0.01);
  for (double x : {0.0, 0.3, 0.7, 1.0})
    EXPECT_DOUBLE_EQ(mtj_resistance_fractional(x, 5e3, 5e3), 5e3);
  EXPECT_THROW(mtj_resistance_fractional(1.1, 1e3, 1e6), std::domain_error);
}

TEST(MtjFractional, MonotoneAndBounded) {
  double prev = mtj_resistance_fractional(0.0, 1e3, 1e6);
  for (int i = 1; i <= 1000; ++i) {
    const double r = mtj_resistance_fractional(i / 1000.0, 1e3, 1e6);
    EXPECT_LT(r, prev);
    EXPECT_GE(r, 1e3);
    EXPECT_LE(r, 1e6);
    prev = r;
  }
}

TEST(MtjWindowed, PlateausAndMidpoint) {
  auto ep = params();
  EXPECT_EQ(mtj_resistance_windowed(ep.pdw_low_m, ep, kTrack), ep.rp_ohm);
  EXPECT_EQ(mtj_resistance_windowed(0.0, ep, kTrack), ep.rp_ohm);
  EXPECT_EQ(mtj_resistance_windowed(ep.pdw_high_m, ep, kTrack), ep.rap_ohm);
  EXPECT_EQ(mtj_resistance_windowed(kTrack.length_m, ep, kTrack), ep.rap_ohm);
  const double mid = 0.5 * (ep.pdw_low_m + ep.pdw_high_m);
  EXPECT_NEAR(mtj_resistance_windowed(mid, ep, kTrack), 1998.0, 0.01);
  EXPECT_THROW(mtj_resistance_windowed(-1e-9, ep, kTrack), std::domain_error);
}

TEST(MtjWindowed, MonotoneAndContinuousAtEdges) {
  const auto ep = params();
  double prev = mtj_resistance_windowed(0.0, ep, kTrack);
  const int n = 100000;
  for (int i = 1; i <= n; ++i) {
    const double r = mtj_resistance_windowed(kTrack.length_m * i / n, ep, kTrack);
    EXPECT_GE(r, prev);
    prev = r;
  }
  const double eps = 1e-6 * (ep.pdw_high_m - ep.pdw_low_m);
  EXPECT_NEAR(mtj_resistance_windowed(ep.pdw_low_m + eps, ep, kTrack), ep.rp_ohm,
              1e-5 * ep.rp_ohm);
  EXPECT_NEAR(mtj_resistance_windowed(ep.pdw_high_m - eps, ep, kTrack), ep.rap_ohm,
              1e-2 * ep.rap_ohm);
}

TEST(CurrentDensity, GateAndArithmetic) {
  auto ep = params();
  ep.i_th_a = 1e-6;
  EXPECT_EQ(current_density(0.5e-6, ep), 0.0);
  EXPECT_NEAR(current_density(100e-6, ep), 0.05 * 1e-4 / 6e-17, 1e-3 * 8.33e10);
  EXPECT_NEAR(current_density(100e-6, ep), 8.33e10, 0.01e10);
  EXPECT_EQ(current_density(-100e-6, ep), -current_density(100e-6, ep));
}

TEST(SolveNode, SeriesReductionWithFloatingJunction) {
  const auto ep = params();
  for (double x : {5e-9, 30e-9, 250e-9}) {
    const auto s = solve_node({1.0, 0.0, std::nullopt}, x, ep, kTrack);
    EXPECT_NEAR(s.i_p_mid, 1.0 / 3900.0, 1e-15);
    EXPECT_NEAR(s.i_mid_q, 1.0 / 3900.0, 1e-15);
    EXPECT_EQ(s.i_mid_ra, 0.0);
  }
}

TEST(SolveNode, EqualPotentialsGiveNoCurrent) {
  const auto s = solve_node({0.7, 0.7, 0.7}, 100e-9, params(), kTrack);
  EXPECT_EQ(s.i_p_mid, 0.0);
  EXPECT_EQ(s.i_mid_q, 0.0);
  EXPECT_EQ(s.i_mid_ra, 0.0);
}

TEST(SolveNode, HugeJunctionReducesToDivider) {
  auto ep = params();
  ep.rp_ohm = 1e18;
  ep.rap_ohm = 1e18;
  const auto tr = track_resistances(100e-9, ep, kTrack);
  const auto s = solve_node({1.0, -0.5, 0.0}, 100e-9, ep, kTrack);
  const double i = 1.5 / (tr.rl_ohm + tr.rr_ohm);
  EXPECT_NEAR(s.v_middle, 1.0 - i * tr.rl_ohm, 1e-12);
}

TEST(SolveNode, MatchesMnaOracleAndConservesCurrent) {
  Rng rng(kSeed);
  auto ep = params();
  for (int i = 0; i < 1000; ++i) {
    TerminalDrive d{uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)};
    if (i % 4 == 1) d.v_p.reset();
    if (i % 4 == 2) d.v_q.reset();
    if (i % 4 == 3) d.v_ra.reset();
    const double x = uniform(rng, 0.0, kTrack.length_m);
    ep.split = (i % 2) ? TrackSplit::netlist : TrackSplit::position;
    if (ep.split == TrackSplit::position && x == 0.0) continue;
    const auto s = solve_node(d, x, ep, kTrack);
    const auto tr = track_resistances(x, ep, kTrack);
    const auto o = mna_solve(d, tr.rl_ohm, tr.rr_ohm, s.r_mtj_ohm);
    // Relative to the terms of the node equation, sum |V_t| / R_t.
    const double scale = std::abs(d.v_p.value_or(0.0)) / tr.rl_ohm +
                         std::abs(d.v_q.value_or(0.0)) / tr.rr_ohm +
                         std::abs(d.v_ra.value_or(0.0)) / s.r_mtj_ohm;
    EXPECT_LE(std::abs(s.i_p_mid - s.i_mid_q - s.i_mid_ra), 1e-12 * scale);
    EXPECT_NEAR(s.v_middle, o.v_mid, 1e-12);
    EXPECT_NEAR(s.i_p_mid, o.i_p, 1e-12 * scale + 1e-18);
    EXPECT_NEAR(s.i_mid_q, -o.i_q, 1e-12 * scale + 1e-18);
    EXPECT_NEAR(s.i_mid_ra, -o.i_ra, 1e-12 * scale + 1e-18);
  }
}

TEST(SolveNode, TrackBranchSelection) {
  const auto ep = params();
  const TerminalDrive d{1.0, 0.0, 0.2};
  const auto left = solve_node(d, 10e-9, ep, kTrack);
  EXPECT_EQ(left.i_track, left.i_p_mid);
  const auto right = solve_node(d, 400e-9, ep, kTrack);
  EXPECT_EQ(right.i_track, right.i_mid_q);
}

TEST(SolveNode, Errors) {
  const auto ep = params();
  EXPECT_THROW(solve_node({1.0, std::nullopt, std::nullopt}, 1e-7, ep, kTrack),
               std::invalid_argument);
  auto pos = ep;
  pos.split = TrackSplit::position;
  EXPECT_THROW(solve_node({1.0, 0.0, std::nullopt}, 0.0, pos, kTrack), std::invalid_argument);
}

TEST(TrackResistances, NetlistSplit) {
  const auto ep = params();
  const auto tr = track_resistances(123e-9, ep, kTrack);
  EXPECT_DOUBLE_EQ(tr.rr_ohm, (500e-9 - ep.pdw_low_m - 10e-9) / 500e-9 * 3900.0);
  EXPECT_DOUBLE_EQ(tr.rl_ohm + tr.rr_ohm, 3900.0);
}

TEST(VoltageDependence, ScalesRapWithFloor) {
  auto ep = params();
  EXPECT_EQ(voltage_scaled_rap(0.5, ep), ep.rap_ohm);
  ep.voltage_dependence = {true, 1.0, 0.4};
  EXPECT_DOUBLE_EQ(voltage_scaled_rap(0.25, ep), 0.75 * ep.rap_ohm);
  EXPECT_DOUBLE_EQ(voltage_scaled_rap(2.0, ep), 0.4 * ep.rap_ohm);
}

TEST(BAnis, SentinelsAndFormula) {
  EXPECT_EQ(b_anis_from_ku(4.05e5, 7.95e5), 20.0);
  EXPECT_EQ(b_anis_from_ku(9.17e5, 1.2e6), 20.0);
  EXPECT_EQ(b_anis_from_ku(1.11e6, 7.95e5), 350.0);
  EXPECT_EQ(b_anis_from_ku(5.36e5, 7.95e5), 350.0);
  EXPECT_EQ(b_anis_from_ku(7.01e5, 7.95e5), 150.0);
  EXPECT_NEAR(b_anis_from_ku(7.0e5, 1e6), (1.4 - 4e-7 * M_PI * 1e6) * 1000, 1e-9);
  EXPECT_NEAR(b_anis_from_ku(7.0e5, 1e6), 143.4, 0.1);
}

TEST(ElectricalParams, Validate) {
  auto ep = params();
  EXPECT_NO_THROW(ep.validate(kTrack));
  ep.rap_ohm = 10.0;
  EXPECT_THROW(ep.validate(kTrack), std::invalid_argument);
  ep = params();
  ep.pdw_high_m = ep.pdw_low_m;
  EXPECT_THROW(ep.validate(kTrack), std::invalid_argument);
}

TEST(SimulateDevice, DrivenWallMovesAndStaysOnTrack) {
  const auto mc = ModelConstants::from_fit({10, 5e-9, 0, 0}, 0.2, 5e-12);
  const auto ep = params();
  const std::vector<DriveSegment> drive{{0.0, {0.01, 0.0, std::nullopt}},
                                        {10.0, {0.0, 0.0, std::nullopt}}};
  const auto out = simulate_device({250e-9, 0.0}, drive, 20.0, mc, kTrack, ep);
  ASSERT_FALSE(out.empty());
  const double i = 0.01 / 3900.0;
  EXPECT_NEAR(out[1].j, current_density(i, ep), 1e-6 * std::abs(out[1].j));
  EXPECT_GT(out.back().state.x_m, 250e-9);
  for (const auto& s : out) {
    EXPECT_GE(s.state.x_m, 0.0);
    EXPECT_LE(s.state.x_m, kTrack.length_m);
  }
  EXPECT_EQ(out.back().j, 0.0);
}
