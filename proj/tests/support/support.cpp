#include "support.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dwkin::testing {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ModelConstants random_constants(Rng& rng) {
  const CubicCoeffs c{uniform(rng, 0.0, 50.0), uniform(rng, 1e-9, 1e-8),
                      uniform(rng, 0.0, 1e-19), uniform(rng, 0.0, 5e-30)};
  return ModelConstants::from_fit(c, uniform(rng, 0.02, 0.5), uniform(rng, 0.0, 2e-11));
}

ModelConstants round_trip_constants() {
  return ModelConstants::from_fit({20.0, 4e-9, 7.5e-20, 1.5625e-30}, 0.05, 1e-11);
}

TrackGeometry long_track() { return {1e-3, 50e-9, 1.2e-9}; }

double poly_accel(const QuarticCoeffs& k, double j) {
  if (j == 0.0) return 0.0;
  const double a = std::abs(j);
  double sum = 0.0;
  double p = 1.0;
  for (double kn : k) {
    sum += kn * p;
    p *= a;
  }
  return j > 0.0 ? sum : -sum;
}

OdeResult fine_rk4(double v0, double j, double t_ns, const ModelConstants& mc,
                   std::size_t steps) {
  const double a = poly_accel(mc.k(), j);
  const double r = mc.d1() + mc.d2() * std::abs(j);
  auto f = [&](double v) { return a - r * v; };
  const double h = t_ns / static_cast<double>(steps);
  double v = v0;
  double x = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double k1 = f(v);
    const double k2 = f(v + 0.5 * h * k1);
    const double k3 = f(v + 0.5 * h * k2);
    const double k4 = f(v + h * k3);
    // x' = v, so the position increment integrates the same stages.
    x += h / 6.0 * (v + 2.0 * (v + 0.5 * h * k1) + 2.0 * (v + 0.5 * h * k2) + (v + h * k3));
    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {x, v};
}

std::vector<TrialFeatures> exact_features(const ModelConstants& mc,
                                          const std::vector<double>& js) {
  std::vector<TrialFeatures> out;
  for (double j : js) {
    const auto& c = mc.c();
    const double v = c[0] + j * (c[1] + j * (c[2] + j * c[3]));
    const double r = mc.d1() + mc.d2() * j;
    TrialFeatures f;
    f.j = j;
    f.max_vel_mps = v;
    f.time_constant_s = 1e-9 / r;
    f.drift_dist_m = v / mc.d1() * 1e-9;
    out.push_back(f);
  }
  return out;
}

std::vector<double> j_ladder(std::size_t n, double step) {
  std::vector<double> js;
  for (std::size_t i = 1; i <= n; ++i) js.push_back(step * static_cast<double>(i));
  return js;
}

RoundTripResult run_round_trip(const ModelConstants& truth,
                               const std::vector<double>& js,
                               const RoundTripOptions& opts) {
  const auto geom = long_track();
  std::vector<SimJob> jobs;
  for (double j : js)
    jobs.push_back({centered_state(geom),
                    CurrentWaveform::pulse(j, opts.pulse_ns, opts.settle_ns), truth,
                    geom, SimOptions{}});
  const auto trajectories = simulate_batch(jobs);

  Rng rng(opts.seed);
  std::normal_distribution<double> noise(0.0, opts.noise);
  RoundTripResult out;
  for (std::size_t i = 0; i < js.size(); ++i) {
    const auto& tr = trajectories[i];
    std::vector<double> t_s(tr.size());
    for (std::size_t s = 0; s < tr.size(); ++s) t_s[s] = tr.time_ns[s] * 1e-9;
    const auto v = extract_velocity(tr.position_m, t_s);
    TrialMeta meta;
    meta.j = js[i];
    meta.run_time_s = opts.pulse_ns * 1e-9;
    auto f = extract_features(tr.position_m, v, t_s, meta);
    if (opts.noise > 0.0) {
      f.max_vel_mps *= 1.0 + noise(rng);
      f.time_constant_s *= 1.0 + noise(rng);
      f.drift_dist_m *= 1.0 + noise(rng);
    }
    out.features.push_back(f);
  }
  out.fit = fit_corner(out.features);
  return out;
}

MagTable tanh_table(const std::vector<double>& centers_m,
                    const std::vector<double>& shifts_m, std::size_t cells,
                    double spacing_m, double wall_width_m, double dt_s) {
  MagTable t;
  t.spacing_m = spacing_m;
  for (std::size_t r = 0; r < centers_m.size(); ++r) {
    t.time_s.push_back(static_cast<double>(r) * dt_s);
    std::vector<double> row(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      const double x = static_cast<double>(i) * spacing_m;
      row[i] = -std::tanh((x - centers_m[r]) / wall_width_m);
    }
    t.profile.push_back(std::move(row));
  }
  t.shift_m = shifts_m;
  return t;
}

MnaResult mna_solve(const TerminalDrive& drive, double rl, double rr, double req) {
  // Unknowns: V_P, V_Q, V_RA, V_mid, then one source current per driven node.
  const std::optional<double> src[3] = {drive.v_p, drive.v_q, drive.v_ra};
  const double g[3] = {1.0 / rl, 1.0 / rr, 1.0 / req};
  int n_src = 0;
  for (const auto& s : src) n_src += s.has_value();
  const int n = 4 + n_src;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  constexpr int mid = 3;
  for (int t = 0; t < 3; ++t) {
    a(t, t) += g[t];
    a(mid, mid) += g[t];
    a(t, mid) -= g[t];
    a(mid, t) -= g[t];
  }
  int row = 4;
  for (int t = 0; t < 3; ++t) {
    if (!src[t]) continue;
    a(t, row) -= 1.0;  // source current flows into node t
    a(row, t) = 1.0;
    b(row) = *src[t];
    ++row;
  }
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  MnaResult r{x(mid), 0.0, 0.0, 0.0};
  double* into[3] = {&r.i_p, &r.i_q, &r.i_ra};
  row = 4;
  for (int t = 0; t < 3; ++t)
    if (src[t]) *into[t] = x(row++);
  return r;
}

ConstantTable random_table(Rng& rng, ConstantName name, std::size_t rows) {
  ConstantTable t;
  t.name = name;
  std::uniform_int_distribution<int> exp10(-40, 10);
  for (std::size_t i = 0; i < rows; ++i) {
    CornerKey key{static_cast<double>(i % 2 ? 31 : 11), uniform(rng, 10, 400),
                  uniform(rng, 0.005, 0.1), uniform(rng, 4e5, 1.5e6),
                  static_cast<double>(50 + i)};
    const double mag = uniform(rng, 1.0, 10.0) * std::pow(10.0, exp10(rng));
    t.rows.push_back({key, (i % 3 == 0 ? -mag : mag)});
  }
  return t;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  Rng rng(std::random_device{}());
  path_ = std::filesystem::temp_directory_path() /
          ("dwkin_" + tag + "_" + std::to_string(rng() % 1000000) + "_" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << body;
}

double rel_err(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

}  // namespace dwkin::testing
