#pragma once

// Small text helpers shared by the file readers and writers.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dwkin::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Whole-field parse; surrounding blanks allowed, trailing junk is not.
std::optional<double> parse_double(std::string_view field);

/// Parses the longest numeric prefix, e.g. "100e-9.out" -> 1e-7.
std::optional<double> parse_double_prefix(std::string_view field);

std::string_view trim(std::string_view s) noexcept;

/// Lines containing ',' or ';' are split on those (fields trimmed, empty
/// fields kept); otherwise the line is split on runs of whitespace.
std::vector<std::string_view> split_fields(std::string_view line);

/// FNV-1a, 64 bit. Stable across platforms; used for workload and config
/// fingerprints.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t value);

}  // namespace dwkin::text
