#include "dwkin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dwkin {

namespace {

void check_grids(const Trajectory& a, const Trajectory& b) {
  a.validate();
  b.validate();
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("trajectories have different sample counts");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double tol = 1e-9 * std::max(1.0, std::abs(b.time_ns[i]));
    if (std::abs(a.time_ns[i] - b.time_ns[i]) > tol)
      throw std::invalid_argument("trajectories are on different time grids; resample first");
  }
}

double rms_between(const Trajectory& c, const Trajectory& r, double t0, double t1) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double t = r.time_ns[i];
    if (t < t0 || t > t1) continue;
    const double d = c.position_m[i] - r.position_m[i];
    sum += d * d;
    ++n;
  }
  return n == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n));
}

}  // namespace

ErrorReport error_report(const Trajectory& candidate, const Trajectory& reference,
                         double pulse_end_ns) {
  check_grids(candidate, reference);
  const auto& r = reference;
  const auto& c = candidate;

  const double dx_r = r.position_m.back() - r.position_m.front();
  const double dx_c = c.position_m.back() - c.position_m.front();
  if (dx_r == 0.0) throw std::invalid_argument("reference displacement is zero");

  double vmax_r = -1.0;
  double vmax_c = 0.0;
  double t_vmax = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.time_ns[i] > pulse_end_ns) break;
    if (std::abs(r.velocity_mps[i]) > vmax_r) {
      vmax_r = std::abs(r.velocity_mps[i]);
      t_vmax = r.time_ns[i];
    }
    vmax_c = std::max(vmax_c, std::abs(c.velocity_mps[i]));
  }
  if (vmax_r < 0.0) throw std::invalid_argument("pulse window contains no samples");

  double t_settle = r.time_ns.back();
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r.time_ns[i] >= pulse_end_ns && std::abs(r.velocity_mps[i]) < 0.01 * vmax_r) {
      t_settle = r.time_ns[i];
      break;
    }

  ErrorReport rep;
  rep.final_displacement_err = std::abs(dx_c - dx_r) / std::abs(dx_r);
  rep.max_velocity_err = vmax_r > 0.0 ? std::abs(vmax_c - vmax_r) / vmax_r : 0.0;
  rep.rms_rise_m = rms_between(c, r, 0.0, t_vmax);
  rep.rms_stop_m = rms_between(c, r, pulse_end_ns, t_settle);
  return rep;
}

Trajectory resample(const Trajectory& traj, std::span<const double> time_ns) {
  traj.validate();
  if (traj.empty()) throw std::invalid_argument("cannot resample an empty trajectory");
  Trajectory out;
  out.reserve(time_ns.size());
  const auto& t = traj.time_ns;
  for (double tq : time_ns) {
    if (tq < t.front() || tq > t.back())
      throw std::invalid_argument("resample time outside the trajectory span");
    auto hi = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), tq) - t.begin());
    if (t[hi] == tq) {
      out.push_back(tq, traj.state(hi), traj.current[hi]);
      continue;
    }
    const std::size_t lo = hi - 1;
    const double w = (tq - t[lo]) / (t[hi] - t[lo]);
    out.push_back(tq,
                  {traj.position_m[lo] + w * (traj.position_m[hi] - traj.position_m[lo]),
                   traj.velocity_mps[lo] + w * (traj.velocity_mps[hi] - traj.velocity_mps[lo])},
                  traj.current[lo]);
  }
  return out;
}

}  // namespace dwkin
