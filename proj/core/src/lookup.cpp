#include "dwkin/lookup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "dwkin/errors.hpp"
#include "dwkin/text.hpp"

namespace dwkin {
namespace {

constexpr std::string_view kHeaderPrefix = "#Aex(*1e12), B_anis, A, Msat, W(nm), ";

std::array<double, 5> coords(const CornerKey& k) {
  return {k.aex_scaled, k.b_anis_mT, k.alpha, k.msat, k.width_nm};
}

}  // namespace

std::string_view constant_label(ConstantName name) noexcept {
  switch (name) {
    case ConstantName::c0: return "c0";
    case ConstantName::c1: return "c1";
    case ConstantName::c2: return "c2";
    case ConstantName::c3: return "c3";
    case ConstantName::drift_const: return "drift_const";
    case ConstantName::d2: return "d2";
  }
  return "?";
}

std::optional<ConstantName> constant_from_label(std::string_view label) noexcept {
  for (auto n : kAllConstants)
    if (constant_label(n) == label) return n;
  return std::nullopt;
}

std::string table_file_name(ConstantName name) {
  switch (name) {
    case ConstantName::c0:
    case ConstantName::c1:
    case ConstantName::c2:
    case ConstantName::c3:
      return "lookup_maxVel_" + std::string(constant_label(name)) + ".tbl";
    default:
      return "lookup_" + std::string(constant_label(name)) + ".tbl";
  }
}

void ConstantTable::validate() const {
  if (rows.empty()) throw std::invalid_argument("constant table is empty");
  std::set<CornerKey> seen;
  for (const auto& r : rows) {
    r.key.validate();
    if (!std::isfinite(r.value))
      throw std::invalid_argument("non-finite value at corner " + r.key.to_string());
    if (!seen.insert(r.key).second)
      throw std::invalid_argument("duplicate corner " + r.key.to_string());
  }
}

std::optional<double> ConstantTable::find(const CornerKey& key) const {
  for (const auto& r : rows)
    if (r.key == key) return r.value;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// .tbl I/O

void write_tbl(std::ostream& out, const ConstantTable& table) {
  table.validate();
  using text::format_double;
  out << kHeaderPrefix << constant_label(table.name) << " \n";
  for (const auto& r : table.rows) {
    const auto& k = r.key;
    out << format_double(k.aex_scaled) << ' ' << format_double(k.b_anis_mT) << ' '
        << format_double(k.alpha) << ' ' << format_double(k.msat) << ' '
        << format_double(k.width_nm) << ' ' << format_double(r.value) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing table");
}

void write_tbl(const std::filesystem::path& path, const ConstantTable& table) {
  table.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_tbl(out, table);
}

ConstantTable read_tbl(std::istream& in, std::optional<ConstantName> fallback) {
  ConstantTable table;
  std::optional<ConstantName> name;
  std::set<CornerKey> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '#') {
      // The constant name is the last comma-separated header field.
      if (!name && table.rows.empty()) {
        const auto comma = trimmed.rfind(',');
        if (comma != std::string_view::npos)
          name = constant_from_label(text::trim(trimmed.substr(comma + 1)));
      }
      continue;
    }
    const auto fields = text::split_fields(trimmed);
    if (fields.size() != 6)
      throw ParseError("expected 6 columns, found " + std::to_string(fields.size()),
                       line_no);
    double v[6];
    for (int i = 0; i < 6; ++i) {
      auto parsed = text::parse_double(fields[static_cast<std::size_t>(i)]);
      if (!parsed || !std::isfinite(*parsed))
        throw ParseError("not a finite number: '" +
                             std::string(fields[static_cast<std::size_t>(i)]) + "'",
                         line_no);
      v[i] = *parsed;
    }
    TableRow row{{v[0], v[1], v[2], v[3], v[4]}, v[5]};
    if (!seen.insert(row.key).second)
      throw ParseError("duplicate corner " + row.key.to_string(), line_no);
    table.rows.push_back(row);
  }
  if (!name) name = fallback;
  if (!name) throw ParseError("cannot tell which constant the table holds");
  if (table.rows.empty()) throw ParseError("table has no rows");
  table.name = *name;
  return table;
}

ConstantTable read_tbl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::optional<ConstantName> fallback;
  for (auto n : kAllConstants)
    if (path.filename() == table_file_name(n)) fallback = n;
  try {
    return read_tbl(in, fallback);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// FittedValues / TableSet

double FittedValues::get(ConstantName name) const noexcept {
  switch (name) {
    case ConstantName::c0: return c[0];
    case ConstantName::c1: return c[1];
    case ConstantName::c2: return c[2];
    case ConstantName::c3: return c[3];
    case ConstantName::drift_const: return drift_const_ns;
    case ConstantName::d2: return d2;
  }
  return 0.0;
}

void FittedValues::set(ConstantName name, double value) noexcept {
  switch (name) {
    case ConstantName::c0: c[0] = value; break;
    case ConstantName::c1: c[1] = value; break;
    case ConstantName::c2: c[2] = value; break;
    case ConstantName::c3: c[3] = value; break;
    case ConstantName::drift_const: drift_const_ns = value; break;
    case ConstantName::d2: d2 = value; break;
  }
}

ModelConstants FittedValues::constants(PinningParams pinning, double c_r) const {
  if (!(drift_const_ns > 0.0))
    throw std::invalid_argument("drift_const must be > 0");
  return ModelConstants::from_fit(c, 1.0 / drift_const_ns, d2, pinning, c_r);
}

TableSet::TableSet(std::array<ConstantTable, 6> tables) : tables_(std::move(tables)) {
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    if (tables_[i].name != kAllConstants[i])
      throw std::invalid_argument("table set is out of order");
    tables_[i].validate();
  }
  std::set<CornerKey> reference;
  for (const auto& r : tables_[0].rows) reference.insert(r.key);
  for (std::size_t i = 1; i < tables_.size(); ++i) {
    std::set<CornerKey> other;
    for (const auto& r : tables_[i].rows) other.insert(r.key);
    if (other != reference)
      throw std::invalid_argument("table " + table_file_name(kAllConstants[i]) +
                                  " has a different corner set than " +
                                  table_file_name(kAllConstants[0]));
  }
  keys_.assign(reference.begin(), reference.end());
}

TableSet TableSet::load(const std::filesystem::path& dir) {
  std::array<ConstantTable, 6> tables;
  for (std::size_t i = 0; i < kAllConstants.size(); ++i) {
    const auto path = dir / table_file_name(kAllConstants[i]);
    tables[i] = read_tbl(path);
    if (tables[i].name != kAllConstants[i])
      throw ParseError(path.string() + ": header names constant '" +
                       std::string(constant_label(tables[i].name)) + "'");
  }
  return TableSet(std::move(tables));
}

void TableSet::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& t : tables_) write_tbl(dir / table_file_name(t.name), t);
}

TableSet TableSet::from_corners(
    const std::vector<std::pair<CornerKey, FittedValues>>& rows) {
  std::array<ConstantTable, 6> tables;
  for (std::size_t i = 0; i < kAllConstants.size(); ++i) {
    tables[i].name = kAllConstants[i];
    for (const auto& [key, values] : rows)
      tables[i].rows.push_back({key, values.get(kAllConstants[i])});
  }
  return TableSet(std::move(tables));
}

const ConstantTable& TableSet::table(ConstantName name) const {
  return tables_[static_cast<std::size_t>(name)];
}

std::optional<FittedValues> TableSet::at(const CornerKey& key) const {
  FittedValues v;
  for (const auto& t : tables_) {
    auto value = t.find(key);
    if (!value) return std::nullopt;
    v.set(t.name, *value);
  }
  return v;
}

bool LookupDiagnostics::any_clamped() const noexcept {
  return std::any_of(clamped.begin(), clamped.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------------------
// Lookup

namespace {

LookupResult lookup_nearest(const CornerKey& key, const TableSet& set) {
  const auto& keys = set.keys();
  std::array<double, 5> lo, hi;
  lo.fill(INFINITY);
  hi.fill(-INFINITY);
  for (const auto& k : keys) {
    const auto c = coords(k);
    for (std::size_t d = 0; d < 5; ++d) {
      lo[d] = std::min(lo[d], c[d]);
      hi[d] = std::max(hi[d], c[d]);
    }
  }
  const auto q = coords(key);
  double best = INFINITY;
  const CornerKey* chosen = nullptr;
  // keys() is sorted, so the first strict improvement wins ties.
  for (const auto& k : keys) {
    const auto c = coords(k);
    double dist = 0.0;
    for (std::size_t d = 0; d < 5; ++d) {
      const double range = hi[d] - lo[d];
      if (range == 0.0) continue;
      const double diff = (q[d] - c[d]) / range;
      dist += diff * diff;
    }
    if (dist < best) {
      best = dist;
      chosen = &k;
    }
  }
  LookupResult r;
  r.values = *set.at(*chosen);
  r.diagnostics.nearest = *chosen;
  r.diagnostics.exact_hit = *chosen == key;
  return r;
}

LookupResult lookup_multilinear(const CornerKey& key, const TableSet& set) {
  const auto& keys = set.keys();
  std::array<std::vector<double>, 5> axes;
  for (const auto& k : keys) {
    const auto c = coords(k);
    for (std::size_t d = 0; d < 5; ++d) axes[d].push_back(c[d]);
  }
  std::size_t grid_size = 1;
  for (auto& a : axes) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    grid_size *= a.size();
  }
  if (grid_size != keys.size())
    throw NumericalError("stored corners do not form a complete grid (" +
                         std::to_string(keys.size()) + " of " +
                         std::to_string(grid_size) +
                         " grid points); use nearest mode");

  std::map<std::array<double, 5>, FittedValues> values;
  for (const auto& k : keys) values.emplace(coords(k), *set.at(k));

  LookupResult result;
  const auto q = coords(key);
  // Per dimension: lower/upper node and the weight of the upper node.
  std::array<std::size_t, 5> lower{};
  std::array<std::size_t, 5> upper{};
  std::array<double, 5> frac{};
  for (std::size_t d = 0; d < 5; ++d) {
    const auto& a = axes[d];
    if (a.size() == 1) {
      lower[d] = upper[d] = 0;
      result.diagnostics.clamped[d] = q[d] != a[0];
      continue;
    }
    if (q[d] <= a.front()) {
      lower[d] = upper[d] = 0;
      result.diagnostics.clamped[d] = q[d] < a.front();
      continue;
    }
    if (q[d] >= a.back()) {
      lower[d] = upper[d] = a.size() - 1;
      result.diagnostics.clamped[d] = q[d] > a.back();
      continue;
    }
    const auto it = std::upper_bound(a.begin(), a.end(), q[d]);
    upper[d] = static_cast<std::size_t>(it - a.begin());
    lower[d] = upper[d] - 1;
    frac[d] = (q[d] - a[lower[d]]) / (a[upper[d]] - a[lower[d]]);
  }

  FittedValues acc;
  for (unsigned corner = 0; corner < 32; ++corner) {
    double w = 1.0;
    std::array<double, 5> node{};
    for (std::size_t d = 0; d < 5; ++d) {
      const bool hi_side = (corner >> d) & 1U;
      if (lower[d] == upper[d]) {
        if (hi_side) { w = 0.0; break; }
        node[d] = axes[d][lower[d]];
        continue;
      }
      w *= hi_side ? frac[d] : 1.0 - frac[d];
      node[d] = axes[d][hi_side ? upper[d] : lower[d]];
    }
    if (w == 0.0) continue;
    const auto& v = values.at(node);
    for (auto n : kAllConstants) acc.set(n, acc.get(n) + w * v.get(n));
  }
  result.values = acc;
  result.diagnostics.exact_hit = set.at(key).has_value();
  if (result.diagnostics.exact_hit) result.values = *set.at(key);
  return result;
}

}  // namespace

LookupResult lookup_constants(const CornerKey& key, const TableSet& tables,
                              LookupMode mode) {
  key.validate();
  switch (mode) {
    case LookupMode::exact: {
      auto v = tables.at(key);
      if (!v) throw NotFoundError("no fitted constants for corner " + key.to_string());
      LookupResult r;
      r.values = *v;
      r.diagnostics.exact_hit = true;
      return r;
    }
    case LookupMode::nearest:
      return lookup_nearest(key, tables);
    case LookupMode::multilinear:
      return lookup_multilinear(key, tables);
  }
  throw std::invalid_argument("unknown lookup mode");
}

}  // namespace dwkin
