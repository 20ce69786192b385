#include "cli/common.hpp"

#include <glob.h>

#include <CLI11.hpp>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "dwkin/errors.hpp"
#include "dwkin/text.hpp"

#ifndef DWKIN_VERSION
#define DWKIN_VERSION "0.0.0"
#endif
#ifndef DWKIN_DEFAULT_TABLES
#define DWKIN_DEFAULT_TABLES "data/corners"
#endif

namespace dwkin::cli {

std::string version() { return DWKIN_VERSION; }

double parse_number(std::string_view text, std::string_view what) {
  const auto v = text::parse_double(text::trim(text));
  if (!v || !std::isfinite(*v))
    throw UsageError(std::string(what) + ": not a number: '" + std::string(text) + "'");
  return *v;
}

double parse_duration_ns(std::string_view raw) {
  const auto s = text::trim(raw);
  double scale = 0.0;
  std::string_view num;
  if (s.size() > 2 && s.substr(s.size() - 2) == "ns") {
    scale = 1.0;
    num = s.substr(0, s.size() - 2);
  } else if (s.size() > 1 && s.back() == 's' &&
             std::isdigit(static_cast<unsigned char>(s[s.size() - 2])) != 0) {
    scale = 1e9;
    num = s.substr(0, s.size() - 1);
  } else if (s.size() > 1 && s.back() == 's' && s[s.size() - 2] == ' ') {
    scale = 1e9;
    num = s.substr(0, s.size() - 1);
  } else {
    throw UsageError("duration '" + std::string(raw) +
                     "' needs a unit suffix (ns or s)");
  }
  const auto v = text::parse_double(text::trim(num));
  if (!v || !std::isfinite(*v))
    throw UsageError("bad duration '" + std::string(raw) + "'");
  return *v * scale;
}

std::map<std::string, std::string> parse_kv_list(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = text::trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw UsageError("expected key=value, got '" + std::string(item) + "'");
    std::string key(text::trim(item.substr(0, eq)));
    if (!out.emplace(key, std::string(text::trim(item.substr(eq + 1)))).second)
      throw UsageError("repeated key '" + key + "'");
  }
  return out;
}

PulseSpec parse_pulse(std::string_view text) {
  auto kv = parse_kv_list(text);
  if (!kv.contains("J") || !kv.contains("tau") || kv.size() != 2)
    throw UsageError("pulse must be J=<A/m^2>,tau=<duration>, got '" +
                     std::string(text) + "'");
  PulseSpec p{parse_number(kv["J"], "pulse J"), parse_duration_ns(kv["tau"])};
  if (!(p.tau_ns > 0.0)) throw UsageError("pulse tau must be > 0");
  return p;
}

std::string provenance_line(const Context& ctx) {
  return "dwkin " + version() + " config=" + ctx.config_hash;
}

void write_output(const std::filesystem::path& path, const std::string& body,
                  const Context& ctx, std::string_view comment) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (!comment.empty()) out << comment << ' ' << provenance_line(ctx) << '\n';
  out << body;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
  std::vector<std::filesystem::path> out;
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw std::runtime_error("glob failed for " + pattern);
  std::sort(out.begin(), out.end());
  return out;
}

void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn,
                  const std::function<void(std::size_t, const std::string&)>& on_error) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mutex);
        on_error(i, e.what());
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
}

std::string default_tables_dir() { return DWKIN_DEFAULT_TABLES; }

void add_constants_options(CLI::App& sub, ConstantsSource& src) {
  sub.add_option("--corner", src.corner,
                 "Corner key in table units, e.g. " + std::string(kDefaultCorner));
  sub.add_option("--constants", src.constants,
                 "Explicit constants c0=,c1=,c2=,c3= and d1= or drift_const=, d2=");
  sub.add_option("--tables", src.tables, "Directory with the six .tbl files")
      ->default_str(default_tables_dir());
  sub.add_option("--lookup", src.lookup, "Lookup mode")
      ->check(CLI::IsMember({"exact", "nearest", "multilinear"}))
      ->capture_default_str();
  sub.add_option("--p1", src.p1, "Pinning current density threshold (A/m^2)")
      ->capture_default_str();
  sub.add_option("--p2", src.p2, "Pinning velocity threshold (m/s)")->capture_default_str();
  sub.add_option("--cr", src.c_r, "End-of-track restitution coefficient")
      ->capture_default_str();
}

ModelConstants resolve_constants(const ConstantsSource& src, const Context& ctx,
                                 bool allow_default) {
  if (!src.corner.empty() && !src.constants.empty())
    throw UsageError("give either --corner or --constants, not both");
  const PinningParams pin{src.p1, src.p2};
  try {
    if (!src.constants.empty()) {
      auto kv = parse_kv_list(src.constants);
      FittedValues fv;
      for (int n = 0; n < 4; ++n) {
        const std::string key = "c" + std::to_string(n);
        if (!kv.contains(key)) throw UsageError("--constants is missing " + key);
        fv.c[static_cast<std::size_t>(n)] = parse_number(kv[key], key);
      }
      if (kv.contains("d1") == kv.contains("drift_const"))
        throw UsageError("--constants needs exactly one of d1 and drift_const");
      fv.drift_const_ns = kv.contains("d1") ? 1.0 / parse_number(kv["d1"], "d1")
                                            : parse_number(kv["drift_const"], "drift_const");
      if (!kv.contains("d2")) throw UsageError("--constants is missing d2");
      fv.d2 = parse_number(kv["d2"], "d2");
      if (kv.size() != 6) throw UsageError("--constants has unknown keys");
      return fv.constants(pin, src.c_r);
    }
    if (src.corner.empty() && !allow_default)
      throw UsageError("give --corner or --constants");
    const auto key = CornerKey::parse(src.corner.empty() ? kDefaultCorner : src.corner);
    const auto tables = TableSet::load(src.tables.empty() ? default_tables_dir() : src.tables);
    const auto res = lookup_constants(key, tables, parse_lookup_mode(src.lookup));
    if (res.diagnostics.nearest)
      ctx.e() << "note: using nearest corner " << res.diagnostics.nearest->to_string() << '\n';
    if (res.diagnostics.any_clamped())
      ctx.e() << "warning: corner lies outside the table grid; interpolation clamped\n";
    return res.values.constants(pin, src.c_r);
  } catch (const NotFoundError& e) {
    throw UsageError(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

TrackGeometry GeometryOptions::geometry() const {
  TrackGeometry g{length_nm * 1e-9, width_nm * 1e-9, thickness_nm * 1e-9};
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return g;
}

void add_geometry_options(CLI::App& sub, GeometryOptions& geom) {
  sub.add_option("--length-nm", geom.length_nm, "Track length")->capture_default_str();
  sub.add_option("--width-nm", geom.width_nm, "Track width")->capture_default_str();
  sub.add_option("--thickness-nm", geom.thickness_nm, "Track thickness")
      ->capture_default_str();
}

void add_waveform_options(CLI::App& sub, WaveformOptions& wf) {
  sub.add_option("--pulse", wf.pulses, "Square pulse J=<A/m^2>,tau=<duration>; repeatable")
      ->take_all();
  sub.add_option("--settle", wf.settle, "Zero-current time after each pulse")
      ->capture_default_str();
  sub.add_option("--waveform", wf.files,
                 "Piecewise-constant waveform CSV (t_start_ns,J_Apm2 + duration_ns footer)")
      ->take_all();
}

double pulse_end_of(const CurrentWaveform& wf) noexcept {
  const auto& segs = wf.segments();
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    if (it->j != 0.0) {
      const auto next = it.base();
      return next == segs.end() ? wf.duration_ns() : next->t_start_ns;
    }
  }
  return wf.duration_ns();
}

std::vector<LabelledWaveform> load_waveforms(const WaveformOptions& opts,
                                             bool require_one) {
  std::vector<LabelledWaveform> out;
  const double settle = parse_duration_ns(opts.settle);
  if (settle < 0.0) throw UsageError("--settle must be >= 0");
  for (const auto& p : opts.pulses) {
    const auto spec = parse_pulse(p);
    auto wf = CurrentWaveform::pulse(spec.j, spec.tau_ns, settle);
    out.push_back({"J=" + text::format_double(spec.j) +
                       "_tau=" + text::format_double(spec.tau_ns) + "ns",
                   wf, spec.tau_ns});
  }
  for (const auto& f : opts.files) {
    std::ifstream in(f);
    if (!in) throw UsageError("cannot open waveform file " + f);
    CurrentWaveform wf = [&] {
      try {
        return read_waveform_csv(in);
      } catch (const ParseError& e) {
        throw UsageError(f + ": " + e.what());
      }
    }();
    const double end = pulse_end_of(wf);
    out.push_back({std::filesystem::path(f).stem().string(), std::move(wf), end});
  }
  if (require_one && out.empty()) throw UsageError("give at least one --pulse or --waveform");
  return out;
}

Integrator parse_integrator(std::string_view name) {
  if (name == "exact") return Integrator::exact;
  if (name == "euler") return Integrator::euler;
  throw UsageError("unknown integrator '" + std::string(name) + "'");
}

LookupMode parse_lookup_mode(std::string_view name) {
  if (name == "exact") return LookupMode::exact;
  if (name == "nearest") return LookupMode::nearest;
  if (name == "multilinear") return LookupMode::multilinear;
  throw UsageError("unknown lookup mode '" + std::string(name) + "'");
}

}  // namespace dwkin::cli
