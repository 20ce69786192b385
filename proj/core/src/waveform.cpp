#include "dwkin/waveform.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "dwkin/errors.hpp"
#include "sampling.hpp"
#include "dwkin/text.hpp"

namespace dwkin {

// ---------------------------------------------------------------------------
// CurrentWaveform

CurrentWaveform::CurrentWaveform(std::vector<Segment> segments,
                                 double duration_ns)
    : segments_(std::move(segments)), duration_ns_(duration_ns) {
  if (segments_.empty())
    throw std::invalid_argument("waveform needs at least one breakpoint");
  if (segments_.front().t_start_ns != 0.0)
    throw std::invalid_argument("waveform must start at t = 0");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.t_start_ns) || !std::isfinite(s.j))
      throw std::invalid_argument("waveform breakpoint is not finite");
    if (i > 0 && !(s.t_start_ns > segments_[i - 1].t_start_ns))
      throw std::invalid_argument("waveform breakpoints must strictly increase");
  }
  if (!std::isfinite(duration_ns_) || !(duration_ns_ > 0.0) ||
      duration_ns_ < segments_.back().t_start_ns)
    throw std::invalid_argument(
        "waveform duration must be > 0 and not before the last breakpoint");
}

CurrentWaveform CurrentWaveform::pulse(double j, double duration_ns,
                                       double settle_ns) {
  if (!(duration_ns > 0.0) || settle_ns < 0.0)
    throw std::invalid_argument("pulse needs duration > 0 and settle >= 0");
  if (settle_ns == 0.0) return constant(j, duration_ns);
  return CurrentWaveform({{0.0, j}, {duration_ns, 0.0}}, duration_ns + settle_ns);
}

CurrentWaveform CurrentWaveform::constant(double j, double duration_ns) {
  return CurrentWaveform({{0.0, j}}, duration_ns);
}

double CurrentWaveform::current_at(double t_ns) const noexcept {
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t_ns,
      [](double t, const Segment& s) { return t < s.t_start_ns; });
  if (it == segments_.begin()) return segments_.front().j;
  return std::prev(it)->j;
}

std::vector<double> CurrentWaveform::breakpoints_between(double t0_ns,
                                                         double t1_ns) const {
  std::vector<double> out;
  for (const auto& s : segments_)
    if (s.t_start_ns > t0_ns && s.t_start_ns < t1_ns) out.push_back(s.t_start_ns);
  return out;
}

CurrentWaveform CurrentWaveform::delayed(double delay_ns) const {
  if (delay_ns < 0.0) throw std::invalid_argument("delay must be >= 0");
  if (delay_ns == 0.0) return *this;
  std::vector<Segment> segs{{0.0, 0.0}};
  for (const auto& s : segments_) segs.push_back({s.t_start_ns + delay_ns, s.j});
  return CurrentWaveform(std::move(segs), duration_ns_ + delay_ns);
}

CurrentWaveform CurrentWaveform::scaled(double factor) const {
  auto segs = segments_;
  for (auto& s : segs) s.j *= factor;
  return CurrentWaveform(std::move(segs), duration_ns_);
}

double CurrentWaveform::max_abs_current() const noexcept {
  double m = 0.0;
  for (const auto& s : segments_) m = std::max(m, std::abs(s.j));
  return m;
}

// ---------------------------------------------------------------------------
// Trajectory

void Trajectory::reserve(std::size_t n) {
  time_ns.reserve(n);
  position_m.reserve(n);
  velocity_mps.reserve(n);
  current.reserve(n);
}

void Trajectory::push_back(double t_ns, const DwState& s, double j) {
  time_ns.push_back(t_ns);
  position_m.push_back(s.x_m);
  velocity_mps.push_back(s.v_mps);
  current.push_back(j);
}

void Trajectory::validate() const {
  const auto n = time_ns.size();
  if (position_m.size() != n || velocity_mps.size() != n || current.size() != n)
    throw std::invalid_argument("trajectory columns have different lengths");
  for (std::size_t i = 1; i < n; ++i)
    if (!(time_ns[i] > time_ns[i - 1]))
      throw std::invalid_argument("trajectory times must strictly increase");
}

// ---------------------------------------------------------------------------
// Simulation

Trajectory simulate(const DwState& initial, const CurrentWaveform& wf,
                    const ModelConstants& mc, const TrackGeometry& geom,
                    const SimOptions& opts) {
  geom.validate();
  if (!(opts.sample_dt_ns > 0.0) || !std::isfinite(opts.sample_dt_ns))
    throw std::invalid_argument("sample_dt must be > 0");
  if (opts.integrator == Integrator::euler && !(opts.euler_dt_ns > 0.0))
    throw std::invalid_argument("euler_dt must be > 0");
  if (initial.x_m < 0.0 || initial.x_m > geom.length_m)
    throw std::invalid_argument("initial position outside the track");

  Trajectory traj;
  traj.reserve(detail::expected_samples(wf, opts.sample_dt_ns));
  DwState state = initial;

  ExactStepCoeffs cached = exact_step_coeffs(0.0, 1.0, mc);
  auto piece = [&](double j, double span) {
    if (opts.integrator == Integrator::exact) {
      // -0.0 == 0.0 here, harmless: both give the same coefficients
      if (cached.j != j || cached.dt_ns != span) cached = exact_step_coeffs(j, span, mc);
      state = step_exact(state, cached, mc, geom);
      return;
    }
    const auto n = static_cast<std::size_t>(
        std::max(1.0, std::ceil(span / opts.euler_dt_ns - 1e-9)));
    const double h = span / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) state = step_euler(state, j, h, mc, geom);
  };
  auto sample = [&](double t, double j) { traj.push_back(t, state, j); };
  detail::walk_samples(wf, opts.sample_dt_ns, piece, sample);
  return traj;
}

DwState centered_state(const TrackGeometry& geom) noexcept {
  return {0.5 * geom.length_m, 0.0};
}

double drift_distance(const Trajectory& traj, double t_off_ns) {
  if (traj.empty() || t_off_ns < traj.time_ns.front() ||
      t_off_ns > traj.time_ns.back())
    throw std::out_of_range("t_off outside the trajectory span");
  const auto it = std::lower_bound(traj.time_ns.begin(), traj.time_ns.end(), t_off_ns);
  const auto idx = static_cast<std::size_t>(it - traj.time_ns.begin());
  return std::abs(traj.position_m.back() - traj.position_m[idx]);
}

double max_velocity(const Trajectory& traj, double t0_ns, double t1_ns) {
  double best = -1.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time_ns[i];
    if (t < t0_ns || t > t1_ns) continue;
    best = std::max(best, std::abs(traj.velocity_mps[i]));
  }
  if (best < 0.0) throw std::invalid_argument("velocity window contains no samples");
  return best;
}

std::vector<Trajectory> simulate_batch(std::span<const SimJob> jobs,
                                       std::size_t max_workers) {
  std::vector<Trajectory> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  if (max_workers == 0)
    max_workers = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min(max_workers, jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto& job = jobs[i];
        results[i] = simulate(job.initial, job.waveform, job.constants,
                              job.geometry, job.options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

using text::format_double;

bool is_skippable(std::string_view line) {
  line = text::trim(line);
  return line.empty() || line.front() == '#';
}

double field_as_double(std::string_view f, std::size_t line_no) {
  auto v = text::parse_double(f);
  if (!v) throw ParseError("not a number: '" + std::string(f) + "'", line_no);
  return *v;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  traj.validate();
  out << "time_ns,position_m,velocity_mps,J_Apm2\n";
  for (std::size_t i = 0; i < traj.size(); ++i)
    out << format_double(traj.time_ns[i]) << ',' << format_double(traj.position_m[i])
        << ',' << format_double(traj.velocity_mps[i]) << ','
        << format_double(traj.current[i]) << '\n';
}

Trajectory read_trajectory_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = text::split_fields(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != 4 || fields[0] != "time_ns")
        throw ParseError("expected header time_ns,position_m,velocity_mps,J_Apm2",
                         line_no);
      continue;
    }
    if (fields.size() != 4) throw ParseError("expected 4 fields", line_no);
    traj.push_back(field_as_double(fields[0], line_no),
                   {field_as_double(fields[1], line_no),
                    field_as_double(fields[2], line_no)},
                   field_as_double(fields[3], line_no));
  }
  if (!header_seen) throw ParseError("empty trajectory file");
  traj.validate();
  return traj;
}

void write_waveform_csv(std::ostream& out, const CurrentWaveform& wf) {
  out << "t_start_ns,J_Apm2\n";
  for (const auto& s : wf.segments())
    out << format_double(s.t_start_ns) << ',' << format_double(s.j) << '\n';
  out << "duration_ns," << format_double(wf.duration_ns()) << '\n';
}

CurrentWaveform read_waveform_csv(std::istream& in,
                                  std::optional<double> duration_ns) {
  std::vector<Segment> segs;
  std::optional<double> footer;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = text::split_fields(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != 2 || fields[0] != "t_start_ns" || fields[1] != "J_Apm2")
        throw ParseError("expected header t_start_ns,J_Apm2", line_no);
      continue;
    }
    if (fields.size() != 2) throw ParseError("expected 2 fields", line_no);
    if (footer) throw ParseError("rows after the duration_ns footer", line_no);
    if (fields[0] == "duration_ns") {
      footer = field_as_double(fields[1], line_no);
      continue;
    }
    segs.push_back({field_as_double(fields[0], line_no),
                    field_as_double(fields[1], line_no)});
  }
  if (!header_seen) throw ParseError("empty waveform file");
  const auto duration = duration_ns ? duration_ns : footer;
  if (!duration)
    throw ParseError("waveform duration missing: add a duration_ns footer row");
  try {
    return CurrentWaveform(std::move(segs), *duration);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace dwkin
