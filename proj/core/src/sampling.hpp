#pragma once

// Sample-grid walk shared by the kinematic simulator and the baselines.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "dwkin/waveform.hpp"

namespace dwkin::detail {

/// Calls `piece(j, span_ns)` for every constant-J stretch between samples
/// and `sample(t_ns, j)` at t = 0 and at each sample time, where j is the
/// current applied over the interval ending at that sample. Samples fall on
/// i * dt plus a final one at the waveform end.
template <class PieceFn, class SampleFn>
void walk_samples(const CurrentWaveform& wf, double dt, PieceFn&& piece,
                  SampleFn&& sample) {
  const double duration = wf.duration_ns();
  const double snap = 1e-9 * dt;
  const auto n_grid = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
  const auto& segs = wf.segments();
  const std::size_t n_segs = segs.size();

  // k: last segment starting at or before t_prev (right-continuous current).
  std::size_t k = 0;
  while (k + 1 < n_segs && segs[k + 1].t_start_ns <= 0.0) ++k;
  sample(0.0, segs[k].j);
  double t_prev = 0.0;
  auto advance_to = [&](double t_next) {
    double a = t_prev;
    while (k + 1 < n_segs && segs[k + 1].t_start_ns < t_next) {
      const double b = segs[k + 1].t_start_ns;
      piece(segs[k].j, b - a);
      a = b;
      ++k;
    }
    const double j_last = segs[k].j;
    if (t_next > a) piece(j_last, t_next - a);
    sample(t_next, j_last);
    while (k + 1 < n_segs && segs[k + 1].t_start_ns <= t_next) ++k;
    t_prev = t_next;
  };
  for (std::size_t i = 1; i <= n_grid; ++i) {
    double t = static_cast<double>(i) * dt;
    if (t > duration - snap) t = duration;
    if (!(t > t_prev)) continue;
    advance_to(t);
  }
  if (t_prev < duration) advance_to(duration);
}

inline std::size_t expected_samples(const CurrentWaveform& wf, double dt) {
  return static_cast<std::size_t>(std::floor(wf.duration_ns() / dt + 1e-9)) + 2;
}

}  // namespace dwkin::detail
