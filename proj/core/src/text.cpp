#include "dwkin/text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

namespace dwkin::text {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf.data(), end);
}

std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view blanks = " \t\r\n";
  const auto first = s.find_first_not_of(blanks);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(blanks);
  return s.substr(first, last - first + 1);
}

namespace {

std::optional<double> parse_impl(std::string_view s, bool whole) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{}) return std::nullopt;
  if (whole && ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

std::optional<double> parse_double(std::string_view field) {
  return parse_impl(field, true);
}

std::optional<double> parse_double_prefix(std::string_view field) {
  return parse_impl(field, false);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  line = trim(line);
  if (line.empty()) return out;
  if (line.find_first_of(",;") != std::string_view::npos) {
    std::size_t pos = 0;
    while (true) {
      const auto next = line.find_first_of(",;", pos);
      out.push_back(trim(line.substr(pos, next - pos)));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto begin = line.find_first_not_of(" \t\r", pos);
    if (begin == std::string_view::npos) break;
    const auto stop = line.find_first_of(" \t\r", begin);
    out.push_back(line.substr(begin, stop - begin));
    if (stop == std::string_view::npos) break;
    pos = stop;
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) noexcept {
  std::uint64_t h = seed;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buf.data(), 16);
}

}  // namespace dwkin::text
