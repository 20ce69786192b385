#pragma once

#include <compare>
#include <string>

namespace dwkin {

/// Micromagnetic parameter corner in lookup-table units.
struct CornerKey {
  double aex_scaled = 0.0;  ///< Aex * 1e12 (J/m)
  double b_anis_mT = 0.0;
  double alpha = 0.0;
  double msat = 0.0;        ///< A/m
  double width_nm = 0.0;

  /// From SI values (Aex in J/m, Ku in J/m^3, W in m). Scaled fields are
  /// rounded to 12 significant digits so 11e-12 * 1e12 lands on 11.
  static CornerKey from_si(double aex, double ku, double alpha, double msat,
                           double width_m);

  /// Throws std::invalid_argument unless finite with W > 0 and Msat > 0.
  void validate() const;

  /// "Aex=11,Banis=20,alpha=0.01,Msat=795000,W=100"
  std::string to_string() const;
  /// Inverse of to_string; keys may come in any order, all five required.
  static CornerKey parse(const std::string& spec);

  auto operator<=>(const CornerKey&) const = default;
};

/// Rounds to `digits` significant decimal digits.
double round_significant(double value, int digits = 12);

}  // namespace dwkin
