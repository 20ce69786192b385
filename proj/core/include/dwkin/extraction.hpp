#pragma once

// Wall position/velocity extraction and per-trial feature computation.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dwkin/mag_table.hpp"

namespace dwkin {

/// Centroid of the one-cell backward difference of a profile, in cell-index
/// units. The profile is treated as preceded by +1, so for a +1 -> -1 step
/// between cells j-1 and j the result is j. Throws NumericalError when the
/// differences sum to zero (no wall).
double wall_centroid(std::span<const double> profile);

/// Absolute wall centre in metres: the backward difference at index i is
/// located half a cell to the left, (centroid - 1/2) * spacing.
double wall_center_m(std::span<const double> profile, double spacing_m);

/// Per-row wall position in metres, re-zeroed to the first row's centroid,
/// with the window shift column added when present.
std::vector<double> extract_position(const MagTable& table);

struct VelocityOptions {
  std::size_t lag = 2;             ///< samples between difference points
  std::size_t smooth_window = 150; ///< Gaussian window length, samples
};

/// (x_i - x_{i-lag}) / (t_i - t_{i-lag}); the first `lag` entries are NaN.
std::vector<double> lagged_velocity(std::span<const double> positions_m,
                                    std::span<const double> times_s,
                                    std::size_t lag);

/// Gaussian-weighted moving average. The window spans `window` samples
/// (for even lengths one more sample before than after), the kernel standard
/// deviation is window / 5, the window shrinks at the ends and NaN samples
/// are skipped.
std::vector<double> gaussian_smooth(std::span<const double> values,
                                    std::size_t window);

/// lagged_velocity followed by gaussian_smooth.
std::vector<double> extract_velocity(std::span<const double> positions_m,
                                     std::span<const double> times_s,
                                     const VelocityOptions& opts = {});

/// Extracted per-trial motion (the on-disk intermediate between extraction
/// and feature analysis). Velocity is the unsmoothed lagged difference.
struct ExtractedMotion {
  std::vector<double> time_s;
  std::vector<double> position_m;
  std::vector<double> velocity_mps;
};

ExtractedMotion extract_motion(const MagTable& table, std::size_t lag = 2);

/// Header `time_s,position_m,velocity_mps`; comment lines carry metadata.
void write_motion_csv(std::ostream& out, const ExtractedMotion& motion,
                      const std::vector<std::string>& comments = {});
ExtractedMotion read_motion_csv(std::istream& in);

struct TrialFeatures {
  double j = 0.0;                ///< A/m^2
  double max_vel_mps = 0.0;
  double time_constant_s = 0.0;
  double drift_dist_m = 0.0;
  bool settled = true;           ///< |v_end| <= 1 % of max_vel
};

/// `velocities_mps` are smoothed velocities aligned with `times_s`.
///   current_end   first sample with t > run time
///   max_vel       max |v| over samples before current_end
///   time_constant first t with |v - v[current_end-1]| < max_vel / e
///   drift_dist    |x_end - x[current_end]|
/// Throws NumericalError if the trace ends during the pulse or no sample
/// satisfies the time-constant predicate.
TrialFeatures extract_features(std::span<const double> positions_m,
                               std::span<const double> velocities_mps,
                               std::span<const double> times_s,
                               const TrialMeta& meta);

/// Smooths `motion.velocity_mps` and extracts the features.
TrialFeatures analyze_trial(const ExtractedMotion& motion, const TrialMeta& meta,
                            std::size_t smooth_window = 150);

void write_features_csv(std::ostream& out, std::span<const TrialFeatures> features);
std::vector<TrialFeatures> read_features_csv(std::istream& in);

}  // namespace dwkin
