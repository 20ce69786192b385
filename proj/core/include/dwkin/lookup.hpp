#pragma once

// Fitted-constant lookup tables (.tbl), one file per constant:
//
//   #Aex(*1e12), B_anis, A, Msat, W(nm), c0
//   11 20 0.01 795000 100 12.5
//   ...

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dwkin/corner.hpp"
#include "dwkin/kinematics.hpp"

namespace dwkin {

enum class ConstantName { c0, c1, c2, c3, drift_const, d2 };

inline constexpr std::array<ConstantName, 6> kAllConstants{
    ConstantName::c0, ConstantName::c1,          ConstantName::c2,
    ConstantName::c3, ConstantName::drift_const, ConstantName::d2};

/// "c0", ..., "drift_const", "d2".
std::string_view constant_label(ConstantName name) noexcept;
std::optional<ConstantName> constant_from_label(std::string_view label) noexcept;
/// "lookup_maxVel_c0.tbl", ..., "lookup_drift_const.tbl", "lookup_d2.tbl".
std::string table_file_name(ConstantName name);

struct TableRow {
  CornerKey key;
  double value = 0.0;
  bool operator==(const TableRow&) const = default;
};

struct ConstantTable {
  ConstantName name = ConstantName::c0;
  std::vector<TableRow> rows;

  /// Non-empty, finite and unique keys. Throws std::invalid_argument.
  void validate() const;
  std::optional<double> find(const CornerKey& key) const;
  bool operator==(const ConstantTable&) const = default;
};

/// Header line then one space-separated row per corner, in stored order,
/// numbers in shortest round-trip form.
void write_tbl(std::ostream& out, const ConstantTable& table);
void write_tbl(const std::filesystem::path& path, const ConstantTable& table);

/// `fallback` names the constant when the file has no header comment.
/// Throws ParseError (with line number) on malformed rows or duplicate keys.
ConstantTable read_tbl(std::istream& in,
                       std::optional<ConstantName> fallback = std::nullopt);
ConstantTable read_tbl(const std::filesystem::path& path);

struct FittedValues {
  CubicCoeffs c{};
  double drift_const_ns = 0.0;
  double d2 = 0.0;

  double get(ConstantName name) const noexcept;
  void set(ConstantName name, double value) noexcept;
  /// d1 = 1 / drift_const, then k from (c, d1, d2).
  ModelConstants constants(PinningParams pinning = {},
                           double c_r = ModelConstants::kDefaultRestitution) const;
};

/// The six tables for one set of corners. Construction rejects differing
/// key sets, so inconsistencies surface at load time.
class TableSet {
 public:
  explicit TableSet(std::array<ConstantTable, 6> tables);

  static TableSet load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;

  /// Builds the six tables from per-corner values (keys must be unique).
  static TableSet from_corners(const std::vector<std::pair<CornerKey, FittedValues>>& rows);

  const ConstantTable& table(ConstantName name) const;
  /// Sorted, unique.
  const std::vector<CornerKey>& keys() const noexcept { return keys_; }
  std::optional<FittedValues> at(const CornerKey& key) const;

 private:
  std::array<ConstantTable, 6> tables_;
  std::vector<CornerKey> keys_;
};

enum class LookupMode { exact, nearest, multilinear };

struct LookupDiagnostics {
  bool exact_hit = false;
  std::optional<CornerKey> nearest;    ///< chosen corner in nearest mode
  std::array<bool, 5> clamped{};       ///< per key dimension, multilinear
  bool any_clamped() const noexcept;
};

struct LookupResult {
  FittedValues values;
  LookupDiagnostics diagnostics;
};

/// exact: the stored corner or NotFoundError.
/// nearest: Euclidean distance in per-dimension min-max normalised key space,
///   ties to the lexicographically smallest key.
/// multilinear: clamped per-dimension linear interpolation on the grid of
///   distinct coordinates. Throws NumericalError when the corners do not form
///   a complete grid.
LookupResult lookup_constants(const CornerKey& key, const TableSet& tables,
                              LookupMode mode);

}  // namespace dwkin
