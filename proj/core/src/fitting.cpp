#include "dwkin/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dwkin/errors.hpp"
#include "dwkin/text.hpp"

namespace dwkin {

ModelConstants FittedCorner::constants(PinningParams pinning, double c_r) const {
  return ModelConstants::from_fit(c, d1_from_drift(drift_const_ns), d2, pinning, c_r);
}

double d1_from_drift(double drift_const_ns) {
  if (!(drift_const_ns > 0.0) || !std::isfinite(drift_const_ns))
    throw std::invalid_argument("drift_const must be finite and > 0");
  return 1.0 / drift_const_ns;
}

namespace {

// Weighted least squares for max_vel = sum_n b_n (J/J_min)^n, n = 0..3.
CubicCoeffs fit_terminal_cubic(std::span<const TrialFeatures> trials,
                               FitDiagnostics& diag) {
  const auto n = static_cast<Eigen::Index>(trials.size());
  const double j_min = trials.front().j;
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = trials[static_cast<std::size_t>(i)];
    if (!(t.max_vel_mps > 0.0))
      throw NumericalError("max_vel must be > 0 for the weighted cubic fit");
    const double sw = 1.0 / t.max_vel_mps;  // sqrt of weight v^-2
    const double x = t.j / j_min;
    design(i, 0) = sw;
    design(i, 1) = sw * x;
    design(i, 2) = sw * x * x;
    design(i, 3) = sw * x * x * x;
    rhs(i) = sw * t.max_vel_mps;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 4) throw NumericalError("cubic design matrix is singular");
  const Eigen::VectorXd b = qr.solve(rhs);

  CubicCoeffs c{};
  double scale = 1.0;
  for (int k = 0; k < 4; ++k) {
    c[static_cast<std::size_t>(k)] = b(k) / scale;
    scale *= j_min;
  }
  for (const auto& t : trials) {
    const double x = t.j / j_min;
    const double fit = ((b(3) * x + b(2)) * x + b(1)) * x + b(0);
    diag.cubic_rel_residuals.push_back((fit - t.max_vel_mps) / t.max_vel_mps);
  }
  return c;
}

}  // namespace

FittedCorner fit_corner(std::span<const TrialFeatures> features,
                        const FitOptions& opts) {
  FittedCorner out;
  auto& diag = out.diagnostics;
  diag.n_input = features.size();

  std::vector<TrialFeatures> trials(features.begin(), features.end());
  std::stable_sort(trials.begin(), trials.end(),
                   [](const auto& a, const auto& b) { return a.j < b.j; });
  for (std::size_t i = 1; i < trials.size(); ++i)
    if (trials[i].j == trials[i - 1].j)
      throw std::invalid_argument("repeated current density " +
                                  text::format_double(trials[i].j));

  // Keep everything up to and including the first trial at or above the cap.
  const auto cap_it = std::find_if(trials.begin(), trials.end(),
                                   [&](const auto& t) { return t.j >= opts.j_cap; });
  if (cap_it != trials.end()) {
    const auto keep = static_cast<std::size_t>(cap_it - trials.begin()) + 1;
    diag.dropped_by_cap = trials.size() - keep;
    trials.resize(keep);
  }

  if (!trials.empty()) {
    const auto peak = std::max_element(
        trials.begin(), trials.end(),
        [](const auto& a, const auto& b) { return a.max_vel_mps < b.max_vel_mps; });
    if (peak->max_vel_mps != trials.back().max_vel_mps) {
      const auto idx = static_cast<std::size_t>(peak - trials.begin());
      diag.truncated_at = idx;
      diag.notes.push_back("max velocity peaks at J = " + text::format_double(peak->j) +
                           "; dropped " + std::to_string(trials.size() - idx - 1) +
                           " higher-current trials");
      trials.resize(idx + 1);
    }
  }

  if (trials.size() < opts.min_trials)
    throw std::invalid_argument("need at least " + std::to_string(opts.min_trials) +
                                " usable trials, have " + std::to_string(trials.size()));
  diag.n_used = trials.size();
  for (const auto& t : trials) diag.used_j.push_back(t.j);

  out.c = fit_terminal_cubic(trials, diag);

  // drift(nm) = drift_const * max_vel, weights 1 / drift.
  double num = 0.0;
  double den = 0.0;
  for (const auto& t : trials) {
    const double drift_nm = t.drift_dist_m * 1e9;
    if (!(drift_nm > 0.0)) throw NumericalError("drift distance must be > 0");
    const double w = 1.0 / drift_nm;
    num += w * t.max_vel_mps * drift_nm;
    den += w * t.max_vel_mps * t.max_vel_mps;
  }
  out.drift_const_ns = num / den;
  if (!(out.drift_const_ns > 0.0) || !std::isfinite(out.drift_const_ns))
    throw NumericalError("fitted drift constant is not positive");
  for (const auto& t : trials)
    diag.drift_residuals_nm.push_back(out.drift_const_ns * t.max_vel_mps -
                                      t.drift_dist_m * 1e9);

  // 1/tau = d1 + d2 |J|.
  const double d1 = 1.0 / out.drift_const_ns;
  double jy = 0.0;
  double jj = 0.0;
  for (const auto& t : trials) {
    const double tau_ns = t.time_constant_s * 1e9;
    if (!(tau_ns > 0.0)) throw NumericalError("time constant must be > 0");
    jy += t.j * (1.0 / tau_ns - d1);
    jj += t.j * t.j;
  }
  diag.d2_unclamped = jy / jj;
  diag.d2_clamped = diag.d2_unclamped < 0.0;
  out.d2 = diag.d2_clamped ? 0.0 : diag.d2_unclamped;
  if (diag.d2_clamped) diag.notes.push_back("d2 clamped to 0");
  return out;
}

}  // namespace dwkin
