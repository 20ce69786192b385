#pragma once

// Three-terminal DW-MTJ: track ports P and Q, tunnel-junction port RA.
//
//        RL            RR
//   P --/\/\-- mid --/\/\-- Q
//               |
//              Req (position dependent)
//               |
//               RA

#include <optional>
#include <vector>

#include "dwkin/kinematics.hpp"
#include "dwkin/waveform.hpp"

namespace dwkin {

enum class TrackSplit {
  /// RR = (L - Pdw_low - 10 nm) / L * Rtotal, RL = Rtotal - RR.
  netlist,
  /// RL = x / L * Rtotal, RR = Rtotal - RL.
  position,
};

struct VoltageDependence {
  bool enabled = false;
  double factor = 1.0;     ///< Rap scale = 1 - V_MTJ * factor
  double min_scale = 0.4;  ///< floor on that scale
};

struct ElectricalParams {
  double rp_ohm = 1e3;
  double rap_ohm = 1e6;
  double rtotal_ohm = 3.9e3;
  double pdw_low_m = 20e-9;
  double pdw_high_m = 40e-9;
  double theta_sh = 0.05;
  double area_m2 = 1.2e-9 * 50e-9;
  double i_th_a = 1e-9;
  TrackSplit split = TrackSplit::netlist;
  VoltageDependence voltage_dependence{};

  /// Checks 0 < Rp <= Rap, Rtotal > 0, 0 <= low < high <= L, area > 0,
  /// I_th >= 0. Throws std::invalid_argument.
  void validate(const TrackGeometry& geom) const;

  /// Parameters with the junction window and cross-section taken from geom.
  static ElectricalParams for_track(const TrackGeometry& geom);
};

/// (Rp / x) || (Rap / (1 - x)); x = 1 gives Rp, x = 0 gives Rap.
double mtj_resistance_fractional(double x_norm, double rp_ohm, double rap_ohm);

/// Rp plateau for x <= Pdw_low, Rap plateau for x >= Pdw_high, parallel
/// interpolation in between (low position maps to Rp).
double mtj_resistance_windowed(double x_m, const ElectricalParams& ep,
                               const TrackGeometry& geom);

/// Same, with Rap replaced by an already voltage-scaled value.
double mtj_resistance_windowed(double x_m, const ElectricalParams& ep,
                               const TrackGeometry& geom, double rap_eff_ohm);

/// Rap after the optional bias dependence, given V(RA) - V(mid).
double voltage_scaled_rap(double v_mtj, const ElectricalParams& ep) noexcept;

/// 0 below the I_th gate, theta_SH * I / area otherwise.
double current_density(double i_track_a, const ElectricalParams& ep) noexcept;

/// Node voltages; std::nullopt marks a floating (high-impedance) terminal.
struct TerminalDrive {
  std::optional<double> v_p;
  std::optional<double> v_q;
  std::optional<double> v_ra;

  int driven_count() const noexcept;
};

struct TrackResistances {
  double rl_ohm;
  double rr_ohm;
};

TrackResistances track_resistances(double x_m, const ElectricalParams& ep,
                                   const TrackGeometry& geom);

struct NodeSolution {
  double v_middle;
  double i_p_mid;    ///< P -> mid through RL
  double i_mid_q;    ///< mid -> Q through RR
  double i_mid_ra;   ///< mid -> RA through the junction
  double i_track;    ///< branch that drives the wall
  double r_mtj_ohm;
};

/// Static solve of the resistor star. Floating terminals carry no current.
/// Throws std::invalid_argument with fewer than two driven terminals or a
/// zero resistance on a driven branch.
NodeSolution solve_node(const TerminalDrive& drive, double x_m,
                        const ElectricalParams& ep, const TrackGeometry& geom);

/// Built-in sentinel corners map to their nominal B_anis (mT); otherwise
/// (Ku / (Msat/2) - mu0 Msat) * 1000.
double b_anis_from_ku(double ku, double msat);

// ---------------------------------------------------------------------------
// Voltage-driven device simulation.

struct DriveSegment {
  double t_start_ns = 0.0;
  TerminalDrive drive;
};

struct DeviceSample {
  double time_ns;
  DwState state;
  double j;
  NodeSolution node;
};

struct DeviceSimOptions {
  double dt_ns = 1e-3;  ///< node solve and motion update cadence
  std::size_t record_every = 10;
  Integrator integrator = Integrator::euler;
};

/// Piecewise-constant terminal voltages -> track current -> J -> wall motion,
/// re-solving the network once per step at the current wall position.
std::vector<DeviceSample> simulate_device(const DwState& initial,
                                          const std::vector<DriveSegment>& drive,
                                          double duration_ns,
                                          const ModelConstants& mc,
                                          const TrackGeometry& geom,
                                          const ElectricalParams& ep,
                                          const DeviceSimOptions& opts = {});

}  // namespace dwkin
