#pragma once

// Reading micromagnetic / experimental magnetization tables and the trial
// metadata encoded in their file names.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dwkin/corner.hpp"

namespace dwkin {

/// One row per time sample: the out-of-plane magnetization sampled at
/// uniformly spaced points along the track.
struct MagTable {
  std::vector<double> time_s;
  std::vector<std::vector<double>> profile;
  std::vector<double> shift_m;  ///< window shift per row; empty if absent
  double spacing_m = 1e-9;

  std::size_t rows() const noexcept { return time_s.size(); }
  std::size_t cells() const noexcept { return profile.empty() ? 0 : profile.front().size(); }
  bool has_shift() const noexcept { return !shift_m.empty(); }
};

enum class ShiftColumns {
  auto_detect,  ///< trailing position/speed pair iff the header names them
  present,
  absent,
};

struct MagTableOptions {
  double spacing_m = 1e-9;
  ShiftColumns shift = ShiftColumns::auto_detect;
  bool check_range = true;  ///< reject magnetization outside [-1, 1]
};

/// Layout: one header line, then rows of time (s), three ignored columns,
/// N magnetization columns and, optionally, the window shift (m) and wall
/// speed columns. Whitespace or comma delimited. Errors carry line numbers.
MagTable read_mag_table(std::istream& in, const MagTableOptions& opts = {});
MagTable read_mag_table(const std::filesystem::path& path,
                        const MagTableOptions& opts = {});

/// Inverse of read_mag_table (header plus rows), used for fixtures.
void write_mag_table(std::ostream& out, const MagTable& table);

struct TrialMeta {
  double j = 0.0;          ///< A/m^2
  double run_time_s = 0.0; ///< stimulus duration
  std::optional<CornerKey> corner;
  std::string name;        ///< file stem the tokens came from
};

/// Parses `_J=<v>_`, `_RT=<v>_` and the corner tokens (Aex, Ku, A, Msat, W)
/// from an underscore-separated name in any order. The corner is filled only
/// when all five corner tokens are present. Throws ParseError when J or RT
/// is missing or not positive.
TrialMeta parse_trial_name(std::string_view name);

/// Uses the parent directory name for mumax `table.txt` outputs.
TrialMeta trial_meta_for_path(const std::filesystem::path& path);

}  // namespace dwkin
