#pragma once

// Kinematic (Newtonian-analogy) domain-wall model.
//
// The wall is a point object on a finite track. Its acceleration is the sum of
// a current-induced term (odd quartic in J), a Stokes-like damping term whose
// rate grows linearly with |J|, and an optional static-friction pinning term.
//
// Units: the integrators work in nm and ns, so a velocity in nm/ns is
// numerically equal to m/s and accelerations are nm/ns^2. Positions crossing
// the public API are in metres; current density is always A/m^2.

#include <array>
#include <optional>

namespace dwkin {

/// Terminal-velocity cubic coefficients c0..c3 (m/s per (A/m^2)^n).
using CubicCoeffs = std::array<double, 4>;

/// Acceleration polynomial coefficients k0..k4 (nm/ns^2 per (A/m^2)^n).
using QuarticCoeffs = std::array<double, 5>;

/// k0 = d1 c0, k_n = d1 c_n + d2 c_{n-1}, k4 = d2 c3.
QuarticCoeffs derive_k(const CubicCoeffs& c, double d1, double d2) noexcept;

struct PinningParams {
  double p1 = 0.0;  ///< |J| threshold, A/m^2. Zero disables pinning.
  double p2 = 0.0;  ///< |v| threshold, m/s.
};

/// Fitted per-corner constants. Always satisfies the k <-> (c, d1, d2)
/// derivation identity exactly.
class ModelConstants {
 public:
  static constexpr double kDefaultRestitution = 0.25;

  /// Builds k0..k4 from the terminal-velocity cubic and the damping rates.
  /// Throws std::invalid_argument on d1 <= 0, d2 < 0, c_r outside [0, 1],
  /// negative pinning thresholds or non-finite input.
  static ModelConstants from_fit(const CubicCoeffs& c, double d1, double d2,
                                 PinningParams pinning = {},
                                 double c_r = kDefaultRestitution);

  /// Accepts an explicit k block (e.g. transcribed from a netlist) and checks
  /// it against the c/d values with exact floating-point equality.
  static ModelConstants from_components(const QuarticCoeffs& k,
                                        const CubicCoeffs& c, double d1,
                                        double d2, PinningParams pinning = {},
                                        double c_r = kDefaultRestitution);

  const QuarticCoeffs& k() const noexcept { return k_; }
  const CubicCoeffs& c() const noexcept { return c_; }
  double d1() const noexcept { return d1_; }
  double d2() const noexcept { return d2_; }
  double p1() const noexcept { return pinning_.p1; }
  double p2() const noexcept { return pinning_.p2; }
  const PinningParams& pinning() const noexcept { return pinning_; }
  double restitution() const noexcept { return c_r_; }

  ModelConstants with_pinning(PinningParams pinning) const;
  ModelConstants with_restitution(double c_r) const;

  bool operator==(const ModelConstants&) const = default;

 private:
  ModelConstants() = default;

  QuarticCoeffs k_{};
  CubicCoeffs c_{};
  double d1_ = 0.0;
  double d2_ = 0.0;
  PinningParams pinning_{};
  double c_r_ = kDefaultRestitution;
};

struct TrackGeometry {
  double length_m = 500e-9;
  double width_m = 50e-9;
  double thickness_m = 1.2e-9;

  /// Throws std::invalid_argument unless all dimensions are finite and > 0.
  void validate() const;
  double cross_section_m2() const noexcept { return width_m * thickness_m; }
  bool operator==(const TrackGeometry&) const = default;
};

struct DwState {
  double x_m = 0.0;    ///< position from the left track end
  double v_mps = 0.0;  ///< velocity (== nm/ns)
  bool operator==(const DwState&) const = default;
};

double accel_current(double j, const ModelConstants& mc) noexcept;
double accel_damping(double v, double j, const ModelConstants& mc) noexcept;

/// `a_j` must be accel_current(j, mc).
double accel_pinning(double j, double v, double a_j,
                     const ModelConstants& mc) noexcept;

double total_accel(double j, double v, const ModelConstants& mc) noexcept;

/// True when |J| < p1 and |v| < p2.
bool is_pinned(double j, double v, const ModelConstants& mc) noexcept;

/// a_J / (d1 + d2|J|); std::nullopt in the pinned regime |J| < p1.
std::optional<double> terminal_velocity(double j, const ModelConstants& mc);

/// Closed-form update for constant J over dt_ns, followed by the end-of-track
/// bounce. A pinned state is returned unchanged.
DwState step_exact(const DwState& state, double j, double dt_ns,
                   const ModelConstants& mc, const TrackGeometry& geom);

/// step_exact split in two so runs of equal (J, dt) pieces reuse the
/// polynomial and expm1.
struct ExactStepCoeffs {
  double j = 0.0;
  double dt_ns = 0.0;
  double rate = 0.0;
  double v_inf = 0.0;
  double growth = 0.0;
  double decay = 0.0;
};
ExactStepCoeffs exact_step_coeffs(double j, double dt_ns, const ModelConstants& mc);
DwState step_exact(const DwState& state, const ExactStepCoeffs& k,
                   const ModelConstants& mc, const TrackGeometry& geom) noexcept;

/// Explicit Euler: v += a dt; x += v dt; bounce. Same ordering as the
/// behavioural netlist model.
DwState step_euler(const DwState& state, double j, double dt_ns,
                   const ModelConstants& mc, const TrackGeometry& geom);

/// Clamps to [0, L] and reverses velocity scaled by c_r when outside.
DwState apply_bounce(const DwState& state, const TrackGeometry& geom,
                     double c_r) noexcept;

}  // namespace dwkin
