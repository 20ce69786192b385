#pragma once

// Per-corner calibration of the kinematic constants from trial features.
//
// Fits run in the units of the original analysis scripts: J in A/m^2,
// velocities in m/s, times in ns and distances in nm. drift_const therefore
// has units of nm per (m/s) = ns and d1 = 1 / drift_const is in 1/ns.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dwkin/corner.hpp"
#include "dwkin/extraction.hpp"
#include "dwkin/kinematics.hpp"

namespace dwkin {

struct FitOptions {
  /// Trials above the first one at or beyond this J are discarded.
  double j_cap = 4e10;
  std::size_t min_trials = 4;
};

struct FitDiagnostics {
  std::size_t n_input = 0;
  std::size_t n_used = 0;
  std::size_t dropped_by_cap = 0;
  /// Index (after sorting and capping) of an interior max_vel peak; trials
  /// beyond it were discarded.
  std::optional<std::size_t> truncated_at;
  std::vector<double> used_j;
  /// (fit - max_vel) / max_vel per used trial.
  std::vector<double> cubic_rel_residuals;
  /// fit - drift, nm.
  std::vector<double> drift_residuals_nm;
  double d2_unclamped = 0.0;
  bool d2_clamped = false;
  std::vector<std::string> notes;
};

struct FittedCorner {
  std::optional<CornerKey> corner;
  CubicCoeffs c{};
  double drift_const_ns = 0.0;
  double d2 = 0.0;
  FitDiagnostics diagnostics;

  double d1() const { return 1.0 / drift_const_ns; }
  ModelConstants constants(PinningParams pinning = {},
                           double c_r = ModelConstants::kDefaultRestitution) const;
};

/// 1 / drift_const; throws std::invalid_argument unless drift_const > 0.
double d1_from_drift(double drift_const_ns);

/// Steps: cap on J, truncation at an interior max-velocity peak, weighted
/// (1/v^2) cubic of max_vel on J/J_min, weighted (1/drift) through-origin
/// line drift = drift_const * max_vel, and d2 from a through-origin least
/// squares of (1/tau - d1) on J, clamped at zero.
///
/// Throws std::invalid_argument for fewer than `min_trials` usable trials or
/// repeated J values, NumericalError for a singular design or a non-positive
/// drift constant.
FittedCorner fit_corner(std::span<const TrialFeatures> features,
                        const FitOptions& opts = {});

}  // namespace dwkin
