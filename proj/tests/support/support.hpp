#pragma once
// Shared fixtures and independent oracles for the unit and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dwkin/electrical.hpp"
#include "dwkin/extraction.hpp"
#include "dwkin/fitting.hpp"
#include "dwkin/kinematics.hpp"
#include "dwkin/lookup.hpp"
#include "dwkin/mag_table.hpp"
#include "dwkin/waveform.hpp"

namespace dwkin::testing {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kSeed = 42;

double uniform(Rng& rng, double lo, double hi);

/// Positive cubic, d1 in [0.02, 0.5] /ns, d2 in [0, 2e-11].
ModelConstants random_constants(Rng& rng);

/// Constants for the calibration round trip: wall time constants between
/// 2.5 and 11 ns, well above the 0.3 ns smoothing kernel.
ModelConstants round_trip_constants();

/// 1 mm track, 50 nm x 1.2 nm cross-section. Long enough that the round-trip
/// and parity workloads never reach an end.
TrackGeometry long_track();

/// Plain polynomial evaluation of sign(J) * (k4|J|^4 + ... + k0), written
/// without reference to the library.
double poly_accel(const QuarticCoeffs& k, double j);

/// v(t) and x(t) (nm) from rest-free initial velocity under constant J using
/// many tiny RK4 steps on v' = a - r v.
struct OdeResult {
  double x_nm;
  double v;
};
OdeResult fine_rk4(double v0, double j, double t_ns, const ModelConstants& mc,
                   std::size_t steps = 200000);

/// Features an ideal wall would produce: max_vel = v_inf, tau = 1 / r,
/// drift = v_inf / d1.
std::vector<TrialFeatures> exact_features(const ModelConstants& mc,
                                          const std::vector<double>& js);

/// 4e9, 8e9, ..., n * 4e9 A/m^2.
std::vector<double> j_ladder(std::size_t n = 10, double step = 4e9);

struct RoundTripOptions {
  double pulse_ns = 100.0;
  double settle_ns = 200.0;
  double noise = 0.0;  ///< relative sigma applied to each extracted feature
  std::uint64_t seed = kSeed;
};

struct RoundTripResult {
  std::vector<TrialFeatures> features;
  FittedCorner fit;
};

/// simulate -> extract_velocity -> extract_features -> fit_corner.
RoundTripResult run_round_trip(const ModelConstants& truth,
                               const std::vector<double>& js,
                               const RoundTripOptions& opts = {});

/// Magnetization table with tanh walls (+1 left of the centre, -1 right).
/// `centers_m` are positions inside the window; when `shifts_m` is non-empty
/// it becomes the shift column.
MagTable tanh_table(const std::vector<double>& centers_m,
                    const std::vector<double>& shifts_m, std::size_t cells,
                    double spacing_m, double wall_width_m, double dt_s = 1e-11);

/// Full modified-nodal-analysis solve of the P/Q/RA star with independent
/// voltage sources, via a dense LU factorisation.
struct MnaResult {
  double v_mid;
  double i_p;   ///< into the network at P
  double i_q;   ///< into the network at Q
  double i_ra;  ///< into the network at RA
};
MnaResult mna_solve(const TerminalDrive& drive, double rl, double rr, double req);

/// Random 32-corner table with values spread over many decades.
ConstantTable random_table(Rng& rng, ConstantName name, std::size_t rows = 32);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& body);

double rel_err(double got, double want);

}  // namespace dwkin::testing
