#include "dwkin/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "dwkin/errors.hpp"
#include "dwkin/text.hpp"

namespace dwkin {

namespace {

using Clock = std::chrono::steady_clock;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void mix(std::uint64_t& h, double x) noexcept {
  auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) {
    h ^= bits & 0xffu;
    h *= 0x100000001b3ull;
    bits >>= 8;
  }
}

struct RunOutput {
  double seconds = 0.0;  // simulation only; hashing is outside the clock
  std::uint64_t hash = 0;
  BaselineStats stats;
};

RunOutput run_once(const BenchModel& model, std::span<const CurrentWaveform> workload,
                   const BenchOptions& opts) {
  RunOutput out;
  out.hash = 0xcbf29ce484222325ull;
  const DwState start = centered_state(opts.geometry);
  for (const auto& wf : workload) {
    Trajectory traj;
    const auto t0 = Clock::now();
    if (const auto* k = std::get_if<KinematicBenchModel>(&model)) {
      SimOptions so;
      so.sample_dt_ns = opts.sample_dt_ns;
      so.integrator = k->integrator;
      traj = simulate(start, wf, k->constants, opts.geometry, so);
    } else {
      traj = simulate_baseline(std::get<BaselineModel>(model), start, wf, opts.geometry,
                               opts.sample_dt_ns, &out.stats);
    }
    out.seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    mix(out.hash, static_cast<double>(trajectory_hash(traj)));
  }
  return out;
}

std::string first_line_with(const std::string& path, const std::string& key) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key, 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return std::string(text::trim(line.substr(colon + 1)));
    }
  return {};
}

}  // namespace

std::string bench_model_id(const BenchModel& model) {
  if (const auto* k = std::get_if<KinematicBenchModel>(&model))
    return k->integrator == Integrator::exact ? "kinematic-exact" : "kinematic-euler";
  return baseline_id(std::get<BaselineModel>(model));
}

std::uint64_t trajectory_hash(const Trajectory& traj) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    mix(h, traj.time_ns[i]);
    mix(h, traj.position_m[i]);
    mix(h, traj.velocity_mps[i]);
    mix(h, traj.current[i]);
  }
  return h;
}

std::string workload_hash(std::span<const CurrentWaveform> workload, double sample_dt_ns) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  mix(h, sample_dt_ns);
  for (const auto& wf : workload) {
    mix(h, wf.duration_ns());
    for (const auto& s : wf.segments()) {
      mix(h, s.t_start_ns);
      mix(h, s.j);
    }
  }
  return text::hex64(h);
}

CurrentWaveform multi_pulse_workload(std::span<const double> amplitudes, double total_ns,
                                     double pulse_ns, double gap_ns) {
  if (amplitudes.empty()) throw std::invalid_argument("no pulse amplitudes");
  if (!(pulse_ns > 0.0) || gap_ns < 0.0 || !(total_ns > 0.0))
    throw std::invalid_argument("pulse train needs pulse > 0, gap >= 0, total > 0");
  std::vector<Segment> segs;
  double t = 0.0;
  std::size_t k = 0;
  while (t < total_ns) {
    const double sign = k % 2 ? -1.0 : 1.0;
    segs.push_back({t, sign * amplitudes[k % amplitudes.size()]});
    t += pulse_ns;
    if (gap_ns > 0.0 && t < total_ns) {
      segs.push_back({t, 0.0});
      t += gap_ns;
    }
    ++k;
  }
  return CurrentWaveform(std::move(segs), total_ns);
}

MachineInfo machine_info() {
  MachineInfo info;
  info.cpu = first_line_with("/proc/cpuinfo", "model name");
  if (info.cpu.empty()) info.cpu = "unknown";
  using period = Clock::period;
  info.timer_resolution_ns = 1e9 * static_cast<double>(period::num) / period::den;
#if defined(__clang__)
  info.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  info.compiler = "gcc " __VERSION__;
#else
  info.compiler = "unknown";
#endif
  info.hardware_threads = std::thread::hardware_concurrency();
  return info;
}

std::vector<BenchResult> bench(std::span<const BenchModel> models,
                               std::span<const CurrentWaveform> workload,
                               const BenchOptions& opts) {
  if (models.empty()) throw std::invalid_argument("no models to benchmark");
  if (workload.empty()) throw std::invalid_argument("empty benchmark workload");
  if (opts.repetitions == 0) throw std::invalid_argument("repetitions must be >= 1");

  double simulated = 0.0;
  for (const auto& wf : workload) simulated += wf.duration_ns();
  const auto wl_hash = workload_hash(workload, opts.sample_dt_ns);

  std::vector<BenchResult> results;
  for (const auto& model : models) {
    BenchResult r;
    r.model_id = bench_model_id(model);
    r.repetitions = opts.repetitions;
    r.simulated_ns = simulated;
    r.workload_hash = wl_hash;

    for (std::size_t i = 0; i < opts.warmup; ++i) run_once(model, workload, opts);

    std::vector<double> per_ns;
    std::uint64_t first_hash = 0;
    for (std::size_t rep = 0; rep < opts.repetitions; ++rep) {
      const auto out = run_once(model, workload, opts);
      per_ns.push_back(std::max(out.seconds, 1e-12) / simulated);
      if (rep == 0) {
        first_hash = out.hash;
        if (out.stats.steps > 0)
          r.trig_calls_per_step = static_cast<double>(out.stats.trig_calls) /
                                  static_cast<double>(out.stats.steps);
      } else if (out.hash != first_hash) {
        throw NumericalError("model " + r.model_id +
                             " produced different trajectories across repetitions");
      }
    }
    r.trajectory_hash = text::hex64(first_hash);
    r.median_s_per_ns = median_of(per_ns);
    std::vector<double> dev;
    for (double x : per_ns) dev.push_back(std::abs(x - r.median_s_per_ns));
    r.mad_s_per_ns = median_of(dev);
    r.min_s_per_ns = *std::min_element(per_ns.begin(), per_ns.end());
    r.max_s_per_ns = *std::max_element(per_ns.begin(), per_ns.end());
    results.push_back(std::move(r));
  }
  double slowest = 0.0;
  for (const auto& r : results) slowest = std::max(slowest, r.median_s_per_ns);
  for (auto& r : results) r.speedup_vs_slowest = slowest / r.median_s_per_ns;
  return results;
}

}  // namespace dwkin
