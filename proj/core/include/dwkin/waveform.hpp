#pragma once

// Piecewise-constant current-density drive and trajectory recording.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dwkin/kinematics.hpp"

namespace dwkin {

struct Segment {
  double t_start_ns = 0.0;
  double j = 0.0;  ///< A/m^2
  bool operator==(const Segment&) const = default;
};

/// Current density held constant from each breakpoint until the next one (or
/// the end of the waveform).
class CurrentWaveform {
 public:
  /// Throws std::invalid_argument unless breakpoints start at 0, strictly
  /// increase, and duration >= the last breakpoint (and > 0).
  CurrentWaveform(std::vector<Segment> segments, double duration_ns);

  /// J for `duration_ns`, then zero for `settle_ns`.
  static CurrentWaveform pulse(double j, double duration_ns, double settle_ns);
  static CurrentWaveform constant(double j, double duration_ns);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  double duration_ns() const noexcept { return duration_ns_; }

  /// J in effect at t (right-continuous at breakpoints).
  double current_at(double t_ns) const noexcept;

  /// Breakpoint times in (t0, t1), ascending.
  std::vector<double> breakpoints_between(double t0_ns, double t1_ns) const;

  /// Prepends `delay_ns` of zero current.
  CurrentWaveform delayed(double delay_ns) const;
  /// Same breakpoints with every J scaled by `factor`.
  CurrentWaveform scaled(double factor) const;

  double max_abs_current() const noexcept;

  bool operator==(const CurrentWaveform&) const = default;

 private:
  std::vector<Segment> segments_;
  double duration_ns_ = 0.0;
};

struct Trajectory {
  std::vector<double> time_ns;
  std::vector<double> position_m;
  std::vector<double> velocity_mps;
  std::vector<double> current;  ///< applied J at each sample, A/m^2

  std::size_t size() const noexcept { return time_ns.size(); }
  bool empty() const noexcept { return time_ns.empty(); }
  void reserve(std::size_t n);
  void push_back(double t_ns, const DwState& s, double j);
  DwState state(std::size_t i) const { return {position_m.at(i), velocity_mps.at(i)}; }

  /// Equal lengths and strictly increasing times; throws std::invalid_argument.
  void validate() const;
  bool operator==(const Trajectory&) const = default;
};

enum class Integrator { exact, euler };

struct SimOptions {
  double sample_dt_ns = 0.01;     ///< matches tableautosave(1e-11)
  Integrator integrator = Integrator::exact;
  double euler_dt_ns = 1e-3;      ///< netlist default step
};

/// Samples every sample_dt_ns from t = 0 and once more at the waveform end.
/// Integration is split at every breakpoint so each step sees constant J.
Trajectory simulate(const DwState& initial, const CurrentWaveform& wf,
                    const ModelConstants& mc, const TrackGeometry& geom,
                    const SimOptions& opts = {});

/// Wall placed at the track centre, at rest.
DwState centered_state(const TrackGeometry& geom) noexcept;

/// |x(end) - x(first sample with t >= t_off)|, in metres.
double drift_distance(const Trajectory& traj, double t_off_ns);

/// Largest |v| over samples with t in [t0, t1].
double max_velocity(const Trajectory& traj, double t0_ns, double t1_ns);

struct SimJob {
  DwState initial;
  CurrentWaveform waveform;
  ModelConstants constants;
  TrackGeometry geometry;
  SimOptions options;
};

/// Runs independent jobs on at most `max_workers` threads (0 = hardware
/// concurrency). Results are returned in job order.
std::vector<Trajectory> simulate_batch(std::span<const SimJob> jobs,
                                       std::size_t max_workers = 0);

// CSV I/O. Trajectory header: time_ns,position_m,velocity_mps,J_Apm2.
// Waveform header: t_start_ns,J_Apm2, optionally ending in a
// `duration_ns,<value>` footer row. Lines starting with '#' are comments.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

void write_waveform_csv(std::ostream& out, const CurrentWaveform& wf);
/// `duration_ns` overrides (or supplies) the footer value when set.
CurrentWaveform read_waveform_csv(std::istream& in,
                                  std::optional<double> duration_ns = std::nullopt);

}  // namespace dwkin
