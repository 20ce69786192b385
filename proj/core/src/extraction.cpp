#include "dwkin/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dwkin/errors.hpp"
#include "dwkin/text.hpp"

namespace dwkin {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double wall_centroid(std::span<const double> profile) {
  if (profile.size() < 2) throw std::invalid_argument("profile needs >= 2 samples");
  double weighted = 0.0;
  double total = 0.0;
  double prev = 1.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double d = prev - profile[i];
    weighted += d * static_cast<double>(i);
    total += d;
    prev = profile[i];
  }
  if (total == 0.0) throw NumericalError("profile contains no wall");
  return weighted / total;
}

double wall_center_m(std::span<const double> profile, double spacing_m) {
  return (wall_centroid(profile) - 0.5) * spacing_m;
}

std::vector<double> extract_position(const MagTable& table) {
  const std::size_t rows = table.rows();
  if (rows == 0) throw std::invalid_argument("empty table");
  if (table.profile.size() != rows || (table.has_shift() && table.shift_m.size() != rows))
    throw std::invalid_argument("table columns have different lengths");
  const std::size_t width = table.cells();

  std::vector<double> centroid(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    if (table.profile[r].size() != width)
      throw ParseError("profile width changes at row " + std::to_string(r + 1));
    try {
      centroid[r] = wall_centroid(table.profile[r]);
    } catch (const NumericalError&) {
      throw NumericalError("no wall in row " + std::to_string(r + 1) + " (t = " +
                           text::format_double(table.time_s[r]) + " s)");
    }
  }
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = (centroid[r] - centroid[0]) * table.spacing_m;
    if (table.has_shift()) out[r] += table.shift_m[r];
  }
  return out;
}

std::vector<double> lagged_velocity(std::span<const double> positions_m,
                                    std::span<const double> times_s,
                                    std::size_t lag) {
  if (lag < 1) throw std::invalid_argument("lag must be >= 1");
  if (positions_m.size() != times_s.size())
    throw std::invalid_argument("positions and times differ in length");
  if (positions_m.size() <= lag)
    throw std::invalid_argument("fewer samples than the difference lag");
  std::vector<double> v(positions_m.size(), kNaN);
  for (std::size_t i = lag; i < v.size(); ++i)
    v[i] = (positions_m[i] - positions_m[i - lag]) / (times_s[i] - times_s[i - lag]);
  return v;
}

std::vector<double> gaussian_smooth(std::span<const double> values,
                                    std::size_t window) {
  if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  if (window == 1) return {values.begin(), values.end()};

  const auto before = static_cast<std::ptrdiff_t>(window / 2);
  const auto after = static_cast<std::ptrdiff_t>(window) - 1 - before;
  const double sigma = static_cast<double>(window) / 5.0;
  std::vector<double> kernel(static_cast<std::size_t>(before + after + 1));
  for (std::ptrdiff_t k = -before; k <= after; ++k) {
    const double z = static_cast<double>(k) / sigma;
    kernel[static_cast<std::size_t>(k + before)] = std::exp(-0.5 * z * z);
  }

  const auto n = static_cast<std::ptrdiff_t>(values.size());
  std::vector<double> out(values.size(), kNaN);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    double norm = 0.0;
    const auto lo = std::max<std::ptrdiff_t>(0, i - before);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, i + after);
    for (auto j = lo; j <= hi; ++j) {
      const double x = values[static_cast<std::size_t>(j)];
      if (std::isnan(x)) continue;
      const double w = kernel[static_cast<std::size_t>(j - i + before)];
      acc += w * x;
      norm += w;
    }
    if (norm > 0.0) out[static_cast<std::size_t>(i)] = acc / norm;
  }
  return out;
}

std::vector<double> extract_velocity(std::span<const double> positions_m,
                                     std::span<const double> times_s,
                                     const VelocityOptions& opts) {
  return gaussian_smooth(lagged_velocity(positions_m, times_s, opts.lag),
                         opts.smooth_window);
}

ExtractedMotion extract_motion(const MagTable& table, std::size_t lag) {
  ExtractedMotion m;
  m.time_s = table.time_s;
  m.position_m = extract_position(table);
  m.velocity_mps = lagged_velocity(m.position_m, m.time_s, lag);
  return m;
}

void write_motion_csv(std::ostream& out, const ExtractedMotion& motion,
                      const std::vector<std::string>& comments) {
  using text::format_double;
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "time_s,position_m,velocity_mps\n";
  for (std::size_t i = 0; i < motion.time_s.size(); ++i)
    out << format_double(motion.time_s[i]) << ',' << format_double(motion.position_m[i])
        << ',' << format_double(motion.velocity_mps[i]) << '\n';
}

ExtractedMotion read_motion_csv(std::istream& in) {
  ExtractedMotion m;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = text::split_fields(trimmed);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "time_s")
        throw ParseError("expected header time_s,position_m,velocity_mps", line_no);
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    double v[3];
    for (int k = 0; k < 3; ++k) {
      auto parsed = text::parse_double(fields[k]);
      if (!parsed) throw ParseError("not a number: '" + std::string(fields[k]) + "'", line_no);
      v[k] = *parsed;
    }
    m.time_s.push_back(v[0]);
    m.position_m.push_back(v[1]);
    m.velocity_mps.push_back(v[2]);
  }
  if (!header_seen) throw ParseError("empty motion file");
  return m;
}

TrialFeatures extract_features(std::span<const double> positions_m,
                               std::span<const double> velocities_mps,
                               std::span<const double> times_s,
                               const TrialMeta& meta) {
  const std::size_t n = times_s.size();
  if (positions_m.size() != n || velocities_mps.size() != n)
    throw std::invalid_argument("trial columns differ in length");
  if (!(meta.j > 0.0) || !(meta.run_time_s > 0.0))
    throw std::invalid_argument("trial needs J > 0 and run time > 0");

  const auto end_it = std::upper_bound(times_s.begin(), times_s.end(), meta.run_time_s);
  if (end_it == times_s.end())
    throw NumericalError("trace of '" + meta.name + "' ends during the pulse");
  const auto current_end = static_cast<std::size_t>(end_it - times_s.begin());
  if (current_end == 0) throw NumericalError("pulse ends before the first sample");

  TrialFeatures f;
  f.j = meta.j;
  f.max_vel_mps = 0.0;
  for (std::size_t i = 0; i < current_end; ++i)
    if (!std::isnan(velocities_mps[i]))
      f.max_vel_mps = std::max(f.max_vel_mps, std::abs(velocities_mps[i]));

  const double v_ref = velocities_mps[current_end - 1];
  if (std::isnan(v_ref)) throw NumericalError("no velocity at the end of the pulse");
  const double threshold = f.max_vel_mps / std::numbers::e;
  bool found = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = velocities_mps[i];
    if (!std::isnan(v) && std::abs(v - v_ref) < threshold) {
      f.time_constant_s = times_s[i];
      found = true;
      break;
    }
  }
  if (!found)
    throw NumericalError("no sample satisfies the time-constant criterion in '" +
                         meta.name + "'");
  f.drift_dist_m = std::abs(positions_m[n - 1] - positions_m[current_end]);
  const double v_last = velocities_mps[n - 1];
  f.settled = !std::isnan(v_last) && std::abs(v_last) <= 0.01 * f.max_vel_mps;
  return f;
}

TrialFeatures analyze_trial(const ExtractedMotion& motion, const TrialMeta& meta,
                            std::size_t smooth_window) {
  const auto smooth = gaussian_smooth(motion.velocity_mps, smooth_window);
  return extract_features(motion.position_m, smooth, motion.time_s, meta);
}

void write_features_csv(std::ostream& out, std::span<const TrialFeatures> features) {
  using text::format_double;
  out << "J_Apm2,max_vel_mps,time_constant_s,drift_dist_m,settled\n";
  for (const auto& f : features)
    out << format_double(f.j) << ',' << format_double(f.max_vel_mps) << ','
        << format_double(f.time_constant_s) << ',' << format_double(f.drift_dist_m)
        << ',' << (f.settled ? 1 : 0) << '\n';
}

std::vector<TrialFeatures> read_features_csv(std::istream& in) {
  std::vector<TrialFeatures> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = text::split_fields(trimmed);
    if (!header_seen) {
      if (fields.empty() || fields[0] != "J_Apm2")
        throw ParseError("expected features header", line_no);
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) throw ParseError("expected 5 fields", line_no);
    double v[5];
    for (int k = 0; k < 5; ++k) {
      auto parsed = text::parse_double(fields[k]);
      if (!parsed) throw ParseError("not a number: '" + std::string(fields[k]) + "'", line_no);
      v[k] = *parsed;
    }
    out.push_back({v[0], v[1], v[2], v[3], v[4] != 0.0});
  }
  return out;
}

}  // namespace dwkin
