#pragma once

// Accuracy metrics between a candidate trajectory and a reference one.

#include <span>

#include "dwkin/waveform.hpp"

namespace dwkin {

struct ErrorReport {
  double final_displacement_err = 0.0;  ///< relative
  double max_velocity_err = 0.0;        ///< relative, over the pulse
  double rms_rise_m = 0.0;              ///< t in [0, reference time of max |v|]
  double rms_stop_m = 0.0;              ///< t in [pulse_end, reference settle time]
  bool operator==(const ErrorReport&) const = default;
};

/// Both trajectories must share one sampling grid (see resample). The
/// reference settles at the first sample after pulse_end with |v| below 1% of
/// its pulse maximum, or at its last sample if it never does.
/// Throws std::invalid_argument on incompatible grids, an empty pulse window
/// or zero reference displacement.
ErrorReport error_report(const Trajectory& candidate, const Trajectory& reference,
                         double pulse_end_ns);

/// Linear interpolation of position and velocity onto `time_ns`; current is
/// taken from the sample at or before each time. Times outside the span throw.
Trajectory resample(const Trajectory& traj, std::span<const double> time_ns);

}  // namespace dwkin
