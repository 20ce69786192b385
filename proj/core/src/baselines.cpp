#include "dwkin/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dwkin/errors.hpp"
#include "sampling.hpp"

namespace dwkin {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}

double unpinned_terminal_velocity(const ModelConstants& mc, double j) {
  return accel_current(j, mc) / (mc.d1() + mc.d2() * std::abs(j));
}

struct CcRhs {
  double q_dot;    // nm/ns
  double phi_dot;  // rad/ns
};

// Effective parameters after the fitted-variant scaling.
struct CcParams {
  double alpha;
  double beta;
  double half_gbk;  // gamma B_k / 2
  double width;
  double kappa;
  bool variable;
  double u_per_j;
};

CcParams effective(const CollectiveCoordinateModel& m) {
  const bool fitted = m.variant == CcVariant::fitted;
  return {m.alpha * (fitted ? m.damping_scale : 1.0),
          m.beta,
          0.5 * m.gamma * m.b_k_T,
          m.width_nm,
          m.kappa,
          m.variant == CcVariant::variable_width,
          m.efficiency * (fitted ? m.drive_scale : 1.0)};
}

CcRhs cc_rhs(const CcParams& p, double u, double phi, BaselineStats* stats) {
  double width = p.width;
  std::uint64_t trig = 1;
  if (p.variable) {
    const double s = std::sin(phi);
    width = p.width / std::sqrt(1.0 + p.kappa * s * s);
    ++trig;
  }
  const double torque = p.half_gbk * std::sin(2.0 * phi);
  const double drive = u / width;
  // alpha A + B = beta u / D,  A - alpha B = torque + u / D
  const double a = (torque + drive + p.alpha * p.beta * drive) / (1.0 + p.alpha * p.alpha);
  const double b = p.beta * drive - p.alpha * a;
  if (stats) {
    ++stats->rhs_evaluations;
    stats->trig_calls += trig;
  }
  return {width * a, b};
}

// nm -> m can round past L even when clamped in nm.
double to_m(double x_nm, const TrackGeometry& geom) {
  return std::clamp(x_nm * 1e-9, 0.0, geom.length_m);
}

Trajectory run_linear(const LinearModel& m, const DwState& initial,
                      const CurrentWaveform& wf, const TrackGeometry& geom,
                      double dt, BaselineStats* stats) {
  Trajectory traj;
  traj.reserve(detail::expected_samples(wf, dt));
  double x_nm = initial.x_m * 1e9;
  const double len_nm = geom.length_m * 1e9;
  double v = initial.v_mps;
  auto piece = [&](double j, double span) {
    v = m.mobility * j;
    x_nm = std::clamp(x_nm + v * span, 0.0, len_nm);
    if (stats) ++stats->steps;
  };
  auto sample = [&](double t, double j) {
    traj.push_back(t, {to_m(x_nm, geom), t == 0.0 ? initial.v_mps : m.mobility * j}, j);
  };
  detail::walk_samples(wf, dt, piece, sample);
  return traj;
}

Trajectory run_inertial(const InertialModel& m, const DwState& initial,
                        const CurrentWaveform& wf, const TrackGeometry& geom,
                        double dt, BaselineStats* stats) {
  Trajectory traj;
  traj.reserve(detail::expected_samples(wf, dt));
  double x_nm = initial.x_m * 1e9;
  const double len_nm = geom.length_m * 1e9;
  double v = initial.v_mps;
  auto piece = [&](double j, double span) {
    const double v_inf = m.mobility * j;
    const double em1 = std::expm1(-span / m.tau_ns);
    x_nm += v_inf * span - (v - v_inf) * m.tau_ns * em1;
    v = v_inf + (v - v_inf) * (1.0 + em1);
    if (x_nm < 0.0 || x_nm > len_nm) {
      x_nm = std::clamp(x_nm, 0.0, len_nm);
      v = 0.0;
    }
    if (stats) ++stats->steps;
  };
  auto sample = [&](double t, double j) { traj.push_back(t, {to_m(x_nm, geom), v}, j); };
  detail::walk_samples(wf, dt, piece, sample);
  return traj;
}

Trajectory run_cc(const CollectiveCoordinateModel& m, const DwState& initial,
                  const CurrentWaveform& wf, const TrackGeometry& geom, double dt,
                  BaselineStats* stats, std::vector<double>* phi_out,
                  double initial_phi) {
  const CcParams p = effective(m);
  Trajectory traj;
  traj.reserve(detail::expected_samples(wf, dt));
  if (phi_out) {
    phi_out->clear();
    phi_out->reserve(detail::expected_samples(wf, dt));
  }
  double q = initial.x_m * 1e9;
  double phi = initial_phi;
  const double len_nm = geom.length_m * 1e9;
  bool at_end = false;

  auto piece = [&](double j, double span) {
    const double u = p.u_per_j * j;
    const auto n = static_cast<std::size_t>(
        std::max(1.0, std::ceil(span / m.max_dt_ns - 1e-9)));
    const double h = span / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k1 = cc_rhs(p, u, phi, stats);
      const auto k2 = cc_rhs(p, u, phi + 0.5 * h * k1.phi_dot, stats);
      const auto k3 = cc_rhs(p, u, phi + 0.5 * h * k2.phi_dot, stats);
      const auto k4 = cc_rhs(p, u, phi + h * k3.phi_dot, stats);
      q += h / 6.0 * (k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot);
      phi += h / 6.0 * (k1.phi_dot + 2.0 * k2.phi_dot + 2.0 * k3.phi_dot + k4.phi_dot);
      at_end = q < 0.0 || q > len_nm;
      q = std::clamp(q, 0.0, len_nm);
      if (stats) ++stats->steps;
    }
  };
  auto sample = [&](double t, double j) {
    double v = t == 0.0 ? initial.v_mps : cc_rhs(p, p.u_per_j * j, phi, stats).q_dot;
    if (at_end) v = 0.0;
    traj.push_back(t, {to_m(q, geom), v}, j);
    if (phi_out) phi_out->push_back(phi);
  };
  detail::walk_samples(wf, dt, piece, sample);
  return traj;
}

}  // namespace

std::string baseline_id(const BaselineModel& model) {
  return std::visit(
      overloaded{
          [](const LinearModel&) { return std::string("linear"); },
          [](const InertialModel&) { return std::string("inertial"); },
          [](const CollectiveCoordinateModel& m) {
            switch (m.variant) {
              case CcVariant::fixed_width: return std::string("cc1d");
              case CcVariant::variable_width: return std::string("cc1d-varwidth");
              case CcVariant::fitted: return std::string("cc1d-fitted");
            }
            return std::string("cc1d");
          },
      },
      model);
}

void validate_baseline(const BaselineModel& model) {
  std::visit(overloaded{
                 [](const LinearModel& m) {
                   if (!std::isfinite(m.mobility))
                     throw std::invalid_argument("mobility must be finite");
                 },
                 [](const InertialModel& m) {
                   if (!std::isfinite(m.mobility))
                     throw std::invalid_argument("mobility must be finite");
                   require_positive(m.tau_ns, "tau");
                 },
                 [](const CollectiveCoordinateModel& m) {
                   require_positive(m.width_nm, "wall width");
                   require_positive(m.alpha, "alpha");
                   require_positive(m.b_k_T, "B_k");
                   require_positive(m.max_dt_ns, "max_dt");
                   require_positive(m.gamma, "gamma");
                   require_positive(m.drive_scale, "drive_scale");
                   require_positive(m.damping_scale, "damping_scale");
                   if (!std::isfinite(m.beta) || m.beta < 0.0)
                     throw std::invalid_argument("beta must be finite and >= 0");
                   if (!std::isfinite(m.efficiency))
                     throw std::invalid_argument("efficiency must be finite");
                   if (!std::isfinite(m.kappa) || m.kappa < 0.0)
                     throw std::invalid_argument("kappa must be finite and >= 0");
                 },
             },
             model);
}

LinearModel calibrate_linear(const ModelConstants& mc, double j_ref) {
  if (j_ref == 0.0 || !std::isfinite(j_ref))
    throw std::invalid_argument("calibration current must be finite and non-zero");
  return {unpinned_terminal_velocity(mc, j_ref) / j_ref};
}

InertialModel calibrate_inertial(const ModelConstants& mc, double j_ref) {
  const auto lin = calibrate_linear(mc, j_ref);
  return {lin.mobility, 1.0 / (mc.d1() + mc.d2() * std::abs(j_ref))};
}

CollectiveCoordinateModel calibrate_cc(const ModelConstants& mc, double j_ref,
                                       CollectiveCoordinateModel base) {
  const auto lin = calibrate_linear(mc, j_ref);
  if (!(base.beta > 0.0))
    throw std::invalid_argument("CC calibration needs beta > 0");
  // Steady velocity is beta u / alpha with the variant scalings applied.
  base.efficiency = 1.0;
  const CcParams p = effective(base);
  base.efficiency = lin.mobility * p.alpha / (p.beta * p.u_per_j);
  validate_baseline(base);
  if (!cc_steady_velocity(base, j_ref))
    throw NumericalError(
        "calibrated CC model is above Walker breakdown at the reference current; "
        "raise b_k_T or move beta closer to alpha");
  return base;
}

CollectiveCoordinateModel fit_cc(const ModelConstants& mc, double j_ref,
                                 CollectiveCoordinateModel base) {
  base.variant = CcVariant::fitted;
  base.drive_scale = 1.0;
  base.damping_scale = 1.0;
  base = calibrate_cc(mc, j_ref, base);

  const double tau = 1.0 / (mc.d1() + mc.d2() * std::abs(j_ref));
  const auto wf = CurrentWaveform::pulse(j_ref, 10.0 * tau, 10.0 * tau);
  const double dt = std::min(0.01, tau / 50.0);
  // Long enough that neither model reaches an end.
  const double travel_m =
      std::abs(unpinned_terminal_velocity(mc, j_ref)) * 1e-9 * 40.0 * tau + 1e-6;
  const TrackGeometry geom{2.0 * travel_m, 50e-9, 1.2e-9};
  const DwState start{travel_m, 0.0};
  SimOptions so;
  so.sample_dt_ns = dt;
  const auto ref = simulate(start, wf, mc, geom, so);

  auto cost = [&](double log_s) {
    auto m = base;
    m.damping_scale = std::exp(log_s);
    m.drive_scale = m.damping_scale;
    if (!cc_steady_velocity(m, j_ref)) return std::numeric_limits<double>::infinity();
    m.max_dt_ns = std::min(base.max_dt_ns, dt);
    const auto cand = simulate_baseline(m, start, wf, geom, dt);
    double sum = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double d = cand.position_m[i] - ref.position_m[i];
      sum += d * d;
    }
    return sum;
  };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(0.2);
  double b = std::log(5.0);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = cost(c);
  double fd = cost(d);
  for (int it = 0; it < 40; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = cost(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = cost(d);
    }
  }
  base.damping_scale = std::exp(0.5 * (a + b));
  base.drive_scale = base.damping_scale;
  if (!cc_steady_velocity(base, j_ref))
    throw NumericalError("fitted CC model ends above Walker breakdown");
  return base;
}

std::optional<double> cc_steady_velocity(const CollectiveCoordinateModel& model,
                                         double j) {
  const CcParams p = effective(model);
  const double u = p.u_per_j * j;
  // Steady tilt solves half_gbk sin(2 phi) = (beta/alpha - 1) u / D(phi).
  const double lhs_scale = (p.beta / p.alpha - 1.0) * u;
  auto residual = [&](double phi) {
    double width = p.width;
    if (p.variable) {
      const double s = std::sin(phi);
      width = p.width / std::sqrt(1.0 + p.kappa * s * s);
    }
    return p.half_gbk * std::sin(2.0 * phi) - lhs_scale / width;
  };
  constexpr int kScan = 4000;
  const double lo = -0.5 * std::numbers::pi;
  const double span = std::numbers::pi;
  double prev = residual(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double r = residual(lo + span * i / kScan);
    if (prev == 0.0 || r == 0.0 || (prev < 0.0) != (r < 0.0))
      return p.beta * u / p.alpha;
    prev = r;
  }
  return std::nullopt;
}

Trajectory simulate_baseline(const BaselineModel& model, const DwState& initial,
                             const CurrentWaveform& wf, const TrackGeometry& geom,
                             double sample_dt_ns, BaselineStats* stats,
                             std::vector<double>* phi_out, double initial_phi) {
  validate_baseline(model);
  geom.validate();
  require_positive(sample_dt_ns, "sample_dt");
  if (initial.x_m < 0.0 || initial.x_m > geom.length_m)
    throw std::invalid_argument("initial position outside the track");
  return std::visit(
      overloaded{
          [&](const LinearModel& m) {
            return run_linear(m, initial, wf, geom, sample_dt_ns, stats);
          },
          [&](const InertialModel& m) {
            return run_inertial(m, initial, wf, geom, sample_dt_ns, stats);
          },
          [&](const CollectiveCoordinateModel& m) {
            return run_cc(m, initial, wf, geom, sample_dt_ns, stats, phi_out,
                          initial_phi);
          },
      },
      model);
}

}  // namespace dwkin
