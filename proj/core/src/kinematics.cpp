#include "dwkin/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dwkin {
namespace {

constexpr double kNmPerM = 1e9;

double sign_of(double x) noexcept { return (x > 0.0) - (x < 0.0); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate_common(const CubicCoeffs& c, double d1, double d2,
                     const PinningParams& pin, double c_r) {
  for (double ci : c) require(std::isfinite(ci), "cubic coefficient is not finite");
  require(std::isfinite(d1) && d1 > 0.0, "d1 must be finite and > 0");
  require(std::isfinite(d2) && d2 >= 0.0, "d2 must be finite and >= 0");
  require(std::isfinite(pin.p1) && pin.p1 >= 0.0, "p1 must be >= 0");
  require(std::isfinite(pin.p2) && pin.p2 >= 0.0, "p2 must be >= 0");
  require(c_r >= 0.0 && c_r <= 1.0, "c_r must lie in [0, 1]");
}

void check_dt(double dt_ns) {
  if (!(dt_ns > 0.0) || !std::isfinite(dt_ns))
    throw std::invalid_argument("time step must be finite and > 0, got " +
                                std::to_string(dt_ns));
}

}  // namespace

QuarticCoeffs derive_k(const CubicCoeffs& c, double d1, double d2) noexcept {
  return {d1 * c[0],
          d1 * c[1] + d2 * c[0],
          d1 * c[2] + d2 * c[1],
          d1 * c[3] + d2 * c[2],
          d2 * c[3]};
}

ModelConstants ModelConstants::from_fit(const CubicCoeffs& c, double d1,
                                        double d2, PinningParams pinning,
                                        double c_r) {
  validate_common(c, d1, d2, pinning, c_r);
  ModelConstants mc;
  mc.c_ = c;
  mc.d1_ = d1;
  mc.d2_ = d2;
  mc.k_ = derive_k(c, d1, d2);
  mc.pinning_ = pinning;
  mc.c_r_ = c_r;
  return mc;
}

ModelConstants ModelConstants::from_components(const QuarticCoeffs& k,
                                               const CubicCoeffs& c, double d1,
                                               double d2, PinningParams pinning,
                                               double c_r) {
  ModelConstants mc = from_fit(c, d1, d2, pinning, c_r);
  if (mc.k_ != k)
    throw std::invalid_argument(
        "k0..k4 do not satisfy the derivation identity for the given c, d1, d2");
  return mc;
}

ModelConstants ModelConstants::with_pinning(PinningParams pinning) const {
  return from_fit(c_, d1_, d2_, pinning, c_r_);
}

ModelConstants ModelConstants::with_restitution(double c_r) const {
  return from_fit(c_, d1_, d2_, pinning_, c_r);
}

void TrackGeometry::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(positive(length_m), "track length must be > 0");
  require(positive(width_m), "track width must be > 0");
  require(positive(thickness_m), "track thickness must be > 0");
}

double accel_current(double j, const ModelConstants& mc) noexcept {
  const auto& k = mc.k();
  const double a = std::abs(j);
  // Horner on |J|; the sign gate zeroes the k0 offset at J == 0.
  const double poly = (((k[4] * a + k[3]) * a + k[2]) * a + k[1]) * a + k[0];
  return sign_of(j) * poly;
}

double accel_damping(double v, double j, const ModelConstants& mc) noexcept {
  return -v * (mc.d1() + mc.d2() * std::abs(j));
}

bool is_pinned(double j, double v, const ModelConstants& mc) noexcept {
  return std::abs(j) < mc.p1() && std::abs(v) < mc.p2();
}

double accel_pinning(double j, double v, double a_j,
                     const ModelConstants& mc) noexcept {
  return is_pinned(j, v, mc) ? -a_j : 0.0;
}

double total_accel(double j, double v, const ModelConstants& mc) noexcept {
  const double a_j = accel_current(j, mc);
  return a_j + accel_damping(v, j, mc) + accel_pinning(j, v, a_j, mc);
}

std::optional<double> terminal_velocity(double j, const ModelConstants& mc) {
  if (std::abs(j) < mc.p1()) return std::nullopt;
  return accel_current(j, mc) / (mc.d1() + mc.d2() * std::abs(j));
}

DwState apply_bounce(const DwState& state, const TrackGeometry& geom,
                     double c_r) noexcept {
  if (state.x_m < 0.0) return {0.0, -c_r * state.v_mps};
  if (state.x_m > geom.length_m) return {geom.length_m, -c_r * state.v_mps};
  return state;
}

ExactStepCoeffs exact_step_coeffs(double j, double dt_ns, const ModelConstants& mc) {
  check_dt(dt_ns);
  ExactStepCoeffs k;
  k.j = j;
  k.dt_ns = dt_ns;
  k.rate = mc.d1() + mc.d2() * std::abs(j);
  k.v_inf = accel_current(j, mc) / k.rate;
  // 1 - exp(-r dt) without cancellation for small r dt.
  k.growth = -std::expm1(-k.rate * dt_ns);
  k.decay = 1.0 - k.growth;
  return k;
}

DwState step_exact(const DwState& state, const ExactStepCoeffs& k,
                   const ModelConstants& mc, const TrackGeometry& geom) noexcept {
  if (is_pinned(k.j, state.v_mps, mc)) return state;
  const double dv = state.v_mps - k.v_inf;
  DwState next;
  next.v_mps = k.v_inf + dv * k.decay;
  const double dx_nm = k.v_inf * k.dt_ns + dv * k.growth / k.rate;
  next.x_m = state.x_m + dx_nm / kNmPerM;
  return apply_bounce(next, geom, mc.restitution());
}

DwState step_exact(const DwState& state, double j, double dt_ns,
                   const ModelConstants& mc, const TrackGeometry& geom) {
  return step_exact(state, exact_step_coeffs(j, dt_ns, mc), mc, geom);
}

DwState step_euler(const DwState& state, double j, double dt_ns,
                   const ModelConstants& mc, const TrackGeometry& geom) {
  check_dt(dt_ns);
  if (is_pinned(j, state.v_mps, mc)) return state;

  DwState next;
  next.v_mps = state.v_mps + total_accel(j, state.v_mps, mc) * dt_ns;
  next.x_m = state.x_m + next.v_mps * dt_ns * 1e-9;
  return apply_bounce(next, geom, mc.restitution());
}

}  // namespace dwkin
