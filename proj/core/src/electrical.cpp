#include "dwkin/electrical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dwkin {
namespace {

// Fixed offset in the netlist track split.
constexpr double kSplitOffsetM = 10e-9;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void ElectricalParams::validate(const TrackGeometry& geom) const {
  geom.validate();
  require(std::isfinite(rp_ohm) && rp_ohm > 0.0, "Rp must be > 0");
  require(std::isfinite(rap_ohm) && rap_ohm >= rp_ohm, "Rap must be >= Rp");
  require(std::isfinite(rtotal_ohm) && rtotal_ohm > 0.0, "Rtotal must be > 0");
  require(pdw_low_m >= 0.0 && pdw_low_m < pdw_high_m &&
              pdw_high_m <= geom.length_m,
          "MTJ window must satisfy 0 <= low < high <= L");
  require(std::isfinite(area_m2) && area_m2 > 0.0, "area must be > 0");
  require(std::isfinite(i_th_a) && i_th_a >= 0.0, "I_th must be >= 0");
  require(std::isfinite(theta_sh), "theta_SH must be finite");
  if (voltage_dependence.enabled)
    require(voltage_dependence.min_scale > 0.0,
            "voltage-dependence floor must be > 0");
}

ElectricalParams ElectricalParams::for_track(const TrackGeometry& geom) {
  ElectricalParams ep;
  ep.area_m2 = geom.cross_section_m2();
  // Same relative window as the netlist defaults (20n..40n on a 120n track).
  ep.pdw_low_m = geom.length_m / 6.0;
  ep.pdw_high_m = geom.length_m / 3.0;
  return ep;
}

double mtj_resistance_fractional(double x_norm, double rp_ohm, double rap_ohm) {
  if (!(x_norm >= 0.0 && x_norm <= 1.0))
    throw std::domain_error("normalized position must lie in [0, 1]");
  if (x_norm == 1.0) return rp_ohm;
  if (x_norm == 0.0) return rap_ohm;
  return rp_ohm * rap_ohm / (x_norm * rap_ohm + (1.0 - x_norm) * rp_ohm);
}

double mtj_resistance_windowed(double x_m, const ElectricalParams& ep,
                               const TrackGeometry& geom, double rap_eff_ohm) {
  if (!(x_m >= 0.0 && x_m <= geom.length_m))
    throw std::domain_error("wall position outside the track");
  const double lo = ep.pdw_low_m;
  const double hi = ep.pdw_high_m;
  if (x_m <= lo) return ep.rp_ohm;
  if (x_m >= hi) return rap_eff_ohm;
  return ((hi - lo) * ep.rp_ohm * rap_eff_ohm) /
         (ep.rp_ohm * (x_m - lo) + rap_eff_ohm * (hi - x_m));
}

double mtj_resistance_windowed(double x_m, const ElectricalParams& ep,
                               const TrackGeometry& geom) {
  return mtj_resistance_windowed(x_m, ep, geom, ep.rap_ohm);
}

double voltage_scaled_rap(double v_mtj, const ElectricalParams& ep) noexcept {
  const auto& vd = ep.voltage_dependence;
  if (!vd.enabled) return ep.rap_ohm;
  const double scale = std::max(1.0 - v_mtj * vd.factor, vd.min_scale);
  return scale * ep.rap_ohm;
}

double current_density(double i_track_a, const ElectricalParams& ep) noexcept {
  if (std::abs(i_track_a) < ep.i_th_a) return 0.0;
  return ep.theta_sh * (i_track_a / ep.area_m2);
}

int TerminalDrive::driven_count() const noexcept {
  return int(v_p.has_value()) + int(v_q.has_value()) + int(v_ra.has_value());
}

TrackResistances track_resistances(double x_m, const ElectricalParams& ep,
                                   const TrackGeometry& geom) {
  const double length = geom.length_m;
  if (ep.split == TrackSplit::netlist) {
    const double rr = (length - ep.pdw_low_m - kSplitOffsetM) / length * ep.rtotal_ohm;
    return {ep.rtotal_ohm - rr, rr};
  }
  const double rl = x_m / length * ep.rtotal_ohm;
  return {rl, ep.rtotal_ohm - rl};
}

namespace {

NodeSolution solve_star(const TerminalDrive& drive, const TrackResistances& tr,
                        double r_mtj) {
  struct Branch {
    std::optional<double> v;
    double r;
  };
  const std::array<Branch, 3> branches{{{drive.v_p, tr.rl_ohm},
                                        {drive.v_q, tr.rr_ohm},
                                        {drive.v_ra, r_mtj}}};
  double g_sum = 0.0;
  double i_sum = 0.0;
  for (const auto& b : branches) {
    if (!b.v) continue;
    if (!(b.r > 0.0) || !std::isfinite(b.r))
      throw std::invalid_argument("driven branch has zero or invalid resistance");
    g_sum += 1.0 / b.r;
    i_sum += *b.v / b.r;
  }
  const double vm = i_sum / g_sum;
  auto branch_current = [&](const Branch& b) {
    return b.v ? (*b.v - vm) / b.r : 0.0;  // into mid
  };
  NodeSolution sol{};
  sol.v_middle = vm;
  sol.i_p_mid = branch_current(branches[0]);
  sol.i_mid_q = -branch_current(branches[1]);
  sol.i_mid_ra = -branch_current(branches[2]);
  sol.r_mtj_ohm = r_mtj;
  return sol;
}

}  // namespace

NodeSolution solve_node(const TerminalDrive& drive, double x_m,
                        const ElectricalParams& ep, const TrackGeometry& geom) {
  if (drive.driven_count() < 2)
    throw std::invalid_argument("at least two terminals must be driven");
  for (auto v : {drive.v_p, drive.v_q, drive.v_ra})
    if (v && !std::isfinite(*v))
      throw std::invalid_argument("terminal voltage is not finite");

  const auto tr = track_resistances(x_m, ep, geom);
  double r_mtj = mtj_resistance_windowed(x_m, ep, geom);
  NodeSolution sol = solve_star(drive, tr, r_mtj);

  if (ep.voltage_dependence.enabled) {
    // One lagged re-solve: the junction bias of the nominal solution sets Rap.
    const double v_ra = drive.v_ra.value_or(sol.v_middle);
    const double rap_eff = voltage_scaled_rap(v_ra - sol.v_middle, ep);
    r_mtj = mtj_resistance_windowed(x_m, ep, geom, rap_eff);
    sol = solve_star(drive, tr, r_mtj);
  }

  const bool left_of_window = x_m < 0.5 * (ep.pdw_low_m + ep.pdw_high_m);
  sol.i_track = left_of_window ? sol.i_p_mid : sol.i_mid_q;
  return sol;
}

double b_anis_from_ku(double ku, double msat) {
  if (!(msat > 0.0)) throw std::invalid_argument("Msat must be > 0");
  if (ku == 1.11e6 || ku == 5.36e5) return 350.0;
  if (ku == 9.17e5 || ku == 4.05e5) return 20.0;
  if (ku == 7.01e5) return 150.0;
  return (ku / (0.5 * msat) - (4.0 * std::numbers::pi * 1e-7) * msat) * 1000.0;
}

std::vector<DeviceSample> simulate_device(const DwState& initial,
                                          const std::vector<DriveSegment>& drive,
                                          double duration_ns,
                                          const ModelConstants& mc,
                                          const TrackGeometry& geom,
                                          const ElectricalParams& ep,
                                          const DeviceSimOptions& opts) {
  ep.validate(geom);
  if (drive.empty() || drive.front().t_start_ns != 0.0)
    throw std::invalid_argument("drive schedule must start at t = 0");
  for (std::size_t i = 1; i < drive.size(); ++i)
    if (!(drive[i].t_start_ns > drive[i - 1].t_start_ns))
      throw std::invalid_argument("drive breakpoints must strictly increase");
  if (!(opts.dt_ns > 0.0) || !(duration_ns > 0.0))
    throw std::invalid_argument("dt and duration must be > 0");
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);

  std::vector<DeviceSample> out;
  DwState state = initial;
  std::size_t seg = 0;
  const auto n_steps =
      static_cast<std::size_t>(std::ceil(duration_ns / opts.dt_ns - 1e-9));
  for (std::size_t step = 0; step <= n_steps; ++step) {
    const double t = std::min(static_cast<double>(step) * opts.dt_ns, duration_ns);
    while (seg + 1 < drive.size() && drive[seg + 1].t_start_ns <= t) ++seg;
    const NodeSolution node = solve_node(drive[seg].drive, state.x_m, ep, geom);
    const double j = current_density(node.i_track, ep);
    if (step % every == 0 || step == n_steps) out.push_back({t, state, j, node});
    if (step == n_steps) break;
    const double h = std::min(opts.dt_ns, duration_ns - t);
    if (!(h > 0.0)) break;
    state = opts.integrator == Integrator::exact
                ? step_exact(state, j, h, mc, geom)
                : step_euler(state, j, h, mc, geom);
  }
  return out;
}

}  // namespace dwkin
