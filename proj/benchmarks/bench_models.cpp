#include <benchmark/benchmark.h>

#include "dwkin/baselines.hpp"
#include "dwkin/bench.hpp"
#include "dwkin/electrical.hpp"
#include "dwkin/kinematics.hpp"

using namespace dwkin;

namespace {

const ModelConstants& wall() {
  static const auto mc = ModelConstants::from_fit({10, 5e-9, 1e-20, 1e-31}, 0.2, 5e-12);
  return mc;
}

const CurrentWaveform& workload() {
  static const std::vector<double> amps{1e10, 2e10, 4e10};
  static const auto wf = multi_pulse_workload(amps, 1000.0, 20.0, 30.0);
  return wf;
}

void BM_StepExact(benchmark::State& state) {
  DwState s{250e-9, 0.0};
  const TrackGeometry geom{};
  double j = 2e10;
  for (auto _ : state) {
    s = step_exact(s, j, 0.01, wall(), geom);
    j = -j;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_StepExact);

void BM_StepEuler(benchmark::State& state) {
  DwState s{250e-9, 0.0};
  const TrackGeometry geom{};
  double j = 2e10;
  for (auto _ : state) {
    s = step_euler(s, j, 1e-3, wall(), geom);
    j = -j;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_StepEuler);

void BM_SimulateWorkload(benchmark::State& state) {
  SimOptions o;
  o.integrator = state.range(0) ? Integrator::euler : Integrator::exact;
  const TrackGeometry geom{};
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate(centered_state(geom), workload(), wall(), geom, o));
}
BENCHMARK(BM_SimulateWorkload)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// 0 linear, 1 inertial, 2 cc1d, 3 cc1d-varwidth
void BM_BaselineWorkload(benchmark::State& state) {
  const TrackGeometry geom{};
  auto var = calibrate_cc(wall(), 2e10);
  var.variant = CcVariant::variable_width;
  const std::vector<BaselineModel> models{calibrate_linear(wall(), 2e10),
                                          calibrate_inertial(wall(), 2e10),
                                          calibrate_cc(wall(), 2e10), var};
  const auto& m = models[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(baseline_id(m));
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_baseline(m, centered_state(geom), workload(), geom));
}
BENCHMARK(BM_BaselineWorkload)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_SolveNode(benchmark::State& state) {
  const TrackGeometry geom{};
  const auto ep = ElectricalParams::for_track(geom);
  double x = 1e-9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_node({1.0, 0.0, 0.2}, x, ep, geom));
    x = x < 499e-9 ? x + 1e-9 : 1e-9;
  }
}
BENCHMARK(BM_SolveNode);

}  // namespace
BENCHMARK_MAIN();
