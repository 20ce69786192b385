#pragma once

// Wall-clock comparison of the kinematic model against the baselines.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dwkin/baselines.hpp"
#include "dwkin/kinematics.hpp"
#include "dwkin/waveform.hpp"

namespace dwkin {

struct KinematicBenchModel {
  ModelConstants constants;
  Integrator integrator = Integrator::exact;
};

using BenchModel = std::variant<KinematicBenchModel, BaselineModel>;

std::string bench_model_id(const BenchModel& model);

struct BenchOptions {
  std::size_t repetitions = 5;
  std::size_t warmup = 1;
  double sample_dt_ns = 0.01;
  TrackGeometry geometry{};
};

struct BenchResult {
  std::string model_id;
  std::size_t repetitions = 0;
  double simulated_ns = 0.0;            ///< per repetition, summed over the workload
  double median_s_per_ns = 0.0;         ///< wall seconds per simulated ns
  double mad_s_per_ns = 0.0;            ///< median absolute deviation
  double min_s_per_ns = 0.0;
  double max_s_per_ns = 0.0;
  double speedup_vs_slowest = 1.0;
  std::string workload_hash;
  std::string trajectory_hash;          ///< identical on every repetition
  double trig_calls_per_step = 0.0;     ///< CC models only
};

struct MachineInfo {
  std::string cpu;
  double timer_resolution_ns = 0.0;
  std::string compiler;
  unsigned hardware_threads = 0;
};

/// Times each model in sequence on one thread. Workloads start from the
/// track centre. Throws std::invalid_argument on an empty model list or
/// workload, and NumericalError if a repetition produces a different
/// trajectory.
std::vector<BenchResult> bench(std::span<const BenchModel> models,
                               std::span<const CurrentWaveform> workload,
                               const BenchOptions& opts = {});

MachineInfo machine_info();

std::string workload_hash(std::span<const CurrentWaveform> workload, double sample_dt_ns);
std::uint64_t trajectory_hash(const Trajectory& traj) noexcept;

/// Pulse train over `total_ns`: alternating-sign pulses of `pulse_ns` at
/// amplitudes cycling through `amplitudes`, separated by `gap_ns` of rest.
CurrentWaveform multi_pulse_workload(std::span<const double> amplitudes,
                                     double total_ns = 1000.0, double pulse_ns = 20.0,
                                     double gap_ns = 30.0);

}  // namespace dwkin
