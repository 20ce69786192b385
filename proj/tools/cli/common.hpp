#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dwkin/kinematics.hpp"
#include "dwkin/lookup.hpp"
#include "dwkin/waveform.hpp"

namespace CLI {
class App;
}

namespace dwkin::cli {

/// Bad flags, values or configuration: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json };

struct GlobalOptions {
  std::size_t jobs = 0;  ///< 0: hardware concurrency
  std::filesystem::path output_dir = ".";
  Format format = Format::csv;
};

struct Context {
  GlobalOptions global;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::string config_hash;
  int exit_code = 0;
  CLI::App* root = nullptr;

  std::ostream& o() const { return *out; }
  std::ostream& e() const { return *err; }
  /// Records a runtime failure without stopping the batch.
  void fail() { exit_code = std::max(exit_code, 1); }
};

std::string version();

/// "100ns", "2.5 ns", "1e-7s". Bare numbers and other units are rejected.
double parse_duration_ns(std::string_view text);

/// Strict number parse with a message naming `what`.
double parse_number(std::string_view text, std::string_view what);

/// "a=1,b=2" -> {{"a","1"},{"b","2"}}; repeated or empty keys throw UsageError.
std::map<std::string, std::string> parse_kv_list(std::string_view text);

struct PulseSpec {
  double j = 0.0;
  double tau_ns = 0.0;
};

/// "J=4e9,tau=100ns".
PulseSpec parse_pulse(std::string_view text);

std::string provenance_line(const Context& ctx);

/// Writes `body` to `path` behind the provenance comment, creating parent
/// directories.
void write_output(const std::filesystem::path& path, const std::string& body,
                  const Context& ctx, std::string_view comment = "#");

/// Paths matching a POSIX glob pattern, sorted. Non-pattern paths are
/// returned as-is when they exist.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

/// Runs fn(i) for i in [0, n) on at most `jobs` threads. Exceptions are
/// caught per item and passed to on_error(i, what).
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn,
                  const std::function<void(std::size_t, const std::string&)>& on_error);

/// Where the model constants come from: a corner in the lookup tables or an
/// explicit list.
struct ConstantsSource {
  std::string corner;
  std::string constants;
  std::string tables;
  std::string lookup = "exact";
  double p1 = 0.0;
  double p2 = 0.0;
  double c_r = ModelConstants::kDefaultRestitution;
};

inline constexpr const char* kDefaultCorner = "Aex=11,Banis=20,alpha=0.01,Msat=795000,W=100";

std::string default_tables_dir();
void add_constants_options(CLI::App& sub, ConstantsSource& src);

/// Resolves constants; with neither --corner nor --constants the default
/// corner is used when `allow_default`.
/// Missing corners in exact mode raise UsageError naming the key.
ModelConstants resolve_constants(const ConstantsSource& src, const Context& ctx,
                                 bool allow_default = true);

struct GeometryOptions {
  double length_nm = 500.0;
  double width_nm = 50.0;
  double thickness_nm = 1.2;
  TrackGeometry geometry() const;
};
void add_geometry_options(CLI::App& sub, GeometryOptions& geom);

/// Waveforms from --pulse/--settle and --waveform, in that order, each with
/// a label used for output names.
struct WaveformOptions {
  std::vector<std::string> pulses;
  std::string settle = "0ns";
  std::vector<std::string> files;
};
struct LabelledWaveform {
  std::string label;
  CurrentWaveform waveform;
  double pulse_end_ns;  ///< end of the last non-zero segment
};
void add_waveform_options(CLI::App& sub, WaveformOptions& wf);
std::vector<LabelledWaveform> load_waveforms(const WaveformOptions& opts,
                                             bool require_one = true);

double pulse_end_of(const CurrentWaveform& wf) noexcept;

Integrator parse_integrator(std::string_view name);
LookupMode parse_lookup_mode(std::string_view name);

}  // namespace dwkin::cli
