#include "dwkin/mag_table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dwkin/electrical.hpp"
#include "dwkin/errors.hpp"
#include "dwkin/text.hpp"

namespace dwkin {

// ---------------------------------------------------------------------------
// CornerKey

double round_significant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  std::ostringstream os;
  os.precision(digits);
  os << std::scientific << value;
  return std::stod(os.str());
}

CornerKey CornerKey::from_si(double aex, double ku, double alpha, double msat,
                             double width_m) {
  CornerKey key;
  key.aex_scaled = round_significant(aex * 1e12);
  key.b_anis_mT = round_significant(b_anis_from_ku(ku, msat));
  key.alpha = alpha;
  key.msat = msat;
  key.width_nm = round_significant(width_m * 1e9);
  return key;
}

void CornerKey::validate() const {
  for (double v : {aex_scaled, b_anis_mT, alpha, msat, width_nm})
    if (!std::isfinite(v)) throw std::invalid_argument("corner key is not finite");
  if (!(width_nm > 0.0)) throw std::invalid_argument("corner width must be > 0");
  if (!(msat > 0.0)) throw std::invalid_argument("corner Msat must be > 0");
}

std::string CornerKey::to_string() const {
  using text::format_double;
  return "Aex=" + format_double(aex_scaled) + ",Banis=" + format_double(b_anis_mT) +
         ",alpha=" + format_double(alpha) + ",Msat=" + format_double(msat) +
         ",W=" + format_double(width_nm);
}

CornerKey CornerKey::parse(const std::string& spec) {
  CornerKey key;
  bool seen[5] = {false, false, false, false, false};
  std::string_view rest = spec;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = text::trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("corner item '" + std::string(item) + "' lacks '='");
    const auto name = item.substr(0, eq);
    const auto value = text::parse_double(item.substr(eq + 1));
    if (!value)
      throw std::invalid_argument("corner item '" + std::string(item) + "' is not numeric");
    int slot = -1;
    if (name == "Aex") { key.aex_scaled = *value; slot = 0; }
    else if (name == "Banis" || name == "B_anis") { key.b_anis_mT = *value; slot = 1; }
    else if (name == "alpha" || name == "A") { key.alpha = *value; slot = 2; }
    else if (name == "Msat") { key.msat = *value; slot = 3; }
    else if (name == "W") { key.width_nm = *value; slot = 4; }
    else throw std::invalid_argument("unknown corner field '" + std::string(name) + "'");
    if (seen[slot])
      throw std::invalid_argument("corner field '" + std::string(name) + "' repeated");
    seen[slot] = true;
  }
  if (!std::all_of(std::begin(seen), std::end(seen), [](bool b) { return b; }))
    throw std::invalid_argument("corner needs Aex, Banis, alpha, Msat and W");
  key.validate();
  return key;
}

// ---------------------------------------------------------------------------
// Tables

namespace {

bool header_names_shift(std::string_view header) {
  std::string lower(header);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower.find("dwpos") != std::string::npos;
}

constexpr std::size_t kLeadingColumns = 4;  // time + three unused

}  // namespace

MagTable read_mag_table(std::istream& in, const MagTableOptions& opts) {
  if (!(opts.spacing_m > 0.0)) throw std::invalid_argument("spacing must be > 0");
  MagTable table;
  table.spacing_m = opts.spacing_m;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  bool with_shift = opts.shift == ShiftColumns::present;
  std::size_t width = 0;
  std::vector<double> row;

  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (opts.shift == ShiftColumns::auto_detect) with_shift = header_names_shift(line);
      continue;
    }
    const auto fields = text::split_fields(line);
    if (width == 0) {
      width = fields.size();
      const std::size_t minimum = kLeadingColumns + 2 + (with_shift ? 2 : 0);
      if (width < minimum)
        throw ParseError("row has " + std::to_string(width) + " columns, need at least " +
                             std::to_string(minimum),
                         line_no);
    } else if (fields.size() != width) {
      throw ParseError("row has " + std::to_string(fields.size()) +
                           " columns, expected " + std::to_string(width),
                       line_no);
    }
    row.clear();
    for (auto f : fields) {
      auto v = text::parse_double(f);
      if (!v) throw ParseError("not a number: '" + std::string(f) + "'", line_no);
      row.push_back(*v);
    }
    const std::size_t mag_end = width - (with_shift ? 2 : 0);
    std::vector<double> profile(row.begin() + kLeadingColumns, row.begin() + mag_end);
    if (opts.check_range)
      for (double m : profile)
        if (!(m >= -1.0 - 1e-9 && m <= 1.0 + 1e-9))
          throw ParseError("magnetization outside [-1, 1]", line_no);
    table.time_s.push_back(row[0]);
    table.profile.push_back(std::move(profile));
    if (with_shift) table.shift_m.push_back(row[width - 2]);
  }
  if (!header_seen || table.rows() == 0) throw ParseError("table has no data rows");
  return table;
}

MagTable read_mag_table(const std::filesystem::path& path, const MagTableOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_mag_table(in, opts);
}

void write_mag_table(std::ostream& out, const MagTable& table) {
  using text::format_double;
  out << "# t (s)\tmx ()\tmy ()\tmz ()";
  for (std::size_t i = 0; i < table.cells(); ++i) out << "\tm.z_crop" << i << " ()";
  if (table.has_shift()) out << "\text_dwpos (m)\text_dwspeed (m/s)";
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out << format_double(table.time_s[r]) << "\t0\t0\t0";
    for (double m : table.profile[r]) out << '\t' << format_double(m);
    if (table.has_shift()) out << '\t' << format_double(table.shift_m[r]) << "\t0";
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Filename metadata

TrialMeta parse_trial_name(std::string_view name) {
  TrialMeta meta;
  meta.name = std::string(name);
  std::optional<double> j, rt, aex, ku, alpha, msat, width;

  std::size_t pos = 0;
  while (pos <= name.size()) {
    const auto next = name.find('_', pos);
    const auto token = name.substr(pos, next == std::string_view::npos ? name.npos : next - pos);
    pos = next == std::string_view::npos ? name.size() + 1 : next + 1;
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = token.substr(0, eq);
    const auto value = text::parse_double_prefix(token.substr(eq + 1));
    if (!value) continue;
    if (key == "J") j = value;
    else if (key == "RT") rt = value;
    else if (key == "Aex") aex = value;
    else if (key == "Ku") ku = value;
    else if (key == "A") alpha = value;
    else if (key == "Msat") msat = value;
    else if (key == "W") width = value;
  }
  if (!j || !rt)
    throw ParseError("name '" + meta.name + "' lacks J= or RT= tokens");
  if (!(*j > 0.0) || !(*rt > 0.0))
    throw ParseError("name '" + meta.name + "': J and RT must be > 0");
  meta.j = *j;
  meta.run_time_s = *rt;
  if (aex && ku && alpha && msat && width && *msat > 0.0 && *width > 0.0)
    meta.corner = CornerKey::from_si(*aex, *ku, *alpha, *msat, *width);
  return meta;
}

TrialMeta trial_meta_for_path(const std::filesystem::path& path) {
  const auto file = path.filename().string();
  if (file == "table.txt" && path.has_parent_path())
    return parse_trial_name(path.parent_path().filename().string());
  return parse_trial_name(file);
}

}  // namespace dwkin
