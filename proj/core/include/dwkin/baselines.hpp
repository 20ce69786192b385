#pragma once

// Reference domain-wall models used for accuracy and speed comparison.
//
// All models consume a CurrentWaveform and emit a Trajectory on the same
// sampling contract as dwkin::simulate, so they are interchangeable in the
// metrics and benchmark code. Positions are clamped to the track; baselines
// do not bounce.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dwkin/kinematics.hpp"
#include "dwkin/waveform.hpp"

namespace dwkin {

/// v = mobility * J, instantaneous.
struct LinearModel {
  double mobility = 1e-8;  ///< m/s per A/m^2
};

/// First-order lag towards mobility * J.
struct InertialModel {
  double mobility = 1e-8;  ///< m/s per A/m^2
  double tau_ns = 1.0;
};

enum class CcVariant { fixed_width, variable_width, fitted };

/// One-dimensional collective-coordinate (q, phi) model of a current-driven
/// wall with adiabatic drive u = efficiency * J and non-adiabatic parameter
/// beta:
///
///   alpha q'/D + phi'  = beta u / D
///   q'/D - alpha phi'  = gamma (B_k / 2) sin(2 phi) + u / D
///
/// Below Walker breakdown the wall settles at q' = beta u / alpha; above it
/// phi precesses and the velocity oscillates. The variable-width variant
/// uses D(phi) = D0 / sqrt(1 + kappa sin^2(phi)); the fitted variant scales
/// u by `drive_scale` and alpha by `damping_scale`.
struct CollectiveCoordinateModel {
  CcVariant variant = CcVariant::fixed_width;
  double width_nm = 6.0;        ///< D0
  double alpha = 0.05;          ///< Gilbert damping
  double beta = 0.055;          ///< non-adiabatic torque parameter
  double b_k_T = 0.1;           ///< hard-axis anisotropy field
  double efficiency = 1e-8;     ///< u per J, (m/s) / (A/m^2)
  double kappa = 1.0;           ///< variable-width strength
  double drive_scale = 1.0;
  double damping_scale = 1.0;
  double max_dt_ns = 0.01;      ///< RK4 step bound
  double gamma = 1.76e2;        ///< rad / (ns T)
};

using BaselineModel = std::variant<LinearModel, InertialModel, CollectiveCoordinateModel>;

std::string baseline_id(const BaselineModel& model);

/// Throws std::invalid_argument for non-positive physical parameters.
void validate_baseline(const BaselineModel& model);

/// Calibration to the kinematic model at J_ref: mobility = v_inf(J_ref)/J_ref,
/// tau = 1/(d1 + d2 J_ref). For the CC model the drive efficiency is solved
/// so the steady velocity at J_ref equals v_inf(J_ref).
LinearModel calibrate_linear(const ModelConstants& mc, double j_ref);
InertialModel calibrate_inertial(const ModelConstants& mc, double j_ref);
CollectiveCoordinateModel calibrate_cc(const ModelConstants& mc, double j_ref,
                                       CollectiveCoordinateModel base = {});

/// Fitted variant: damping_scale minimises the RMS position error against the
/// kinematic exact trajectory for one pulse at j_ref (length 10 tau_m, then
/// 10 tau_m of rest), with drive_scale tied to damping_scale so the steady
/// velocity stays at v_inf(J_ref). Golden-section search over [0.2, 5].
CollectiveCoordinateModel fit_cc(const ModelConstants& mc, double j_ref,
                                 CollectiveCoordinateModel base = {});

struct BaselineStats {
  std::uint64_t rhs_evaluations = 0;
  std::uint64_t trig_calls = 0;
  std::uint64_t steps = 0;
};

/// For the CC model the tilt angle is returned through `phi_out` (one entry
/// per sample) when non-null.
Trajectory simulate_baseline(const BaselineModel& model, const DwState& initial,
                             const CurrentWaveform& wf, const TrackGeometry& geom,
                             double sample_dt_ns = 0.01,
                             BaselineStats* stats = nullptr,
                             std::vector<double>* phi_out = nullptr,
                             double initial_phi = 0.0);

/// Steady (q', phi' = 0) velocity of the CC model at constant J, or nullopt
/// above Walker breakdown.
std::optional<double> cc_steady_velocity(const CollectiveCoordinateModel& model,
                                         double j);

}  // namespace dwkin
