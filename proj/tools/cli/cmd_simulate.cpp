#include <CLI11.hpp>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "cli/commands.hpp"
#include "dwkin/text.hpp"

namespace dwkin::cli {

namespace {

struct SimulateArgs {
  ConstantsSource constants;
  GeometryOptions geometry;
  WaveformOptions waveforms;
  std::string sample_dt = "0.01ns";
  std::string integrator = "exact";
  std::string euler_dt = "0.001ns";
  double x0_nm = -1.0;
};

std::string trajectory_json(const Trajectory& traj, const Context& ctx,
                            const std::string& label) {
  nlohmann::ordered_json j;
  j["provenance"] = provenance_line(ctx);
  j["waveform"] = label;
  j["time_ns"] = traj.time_ns;
  j["position_m"] = traj.position_m;
  j["velocity_mps"] = traj.velocity_mps;
  j["J_Apm2"] = traj.current;
  return j.dump() + "\n";
}

void run(const SimulateArgs& a, Context& ctx) {
  const auto geom = a.geometry.geometry();
  const auto mc = resolve_constants(a.constants, ctx);
  const auto waves = load_waveforms(a.waveforms);

  SimOptions so;
  so.sample_dt_ns = parse_duration_ns(a.sample_dt);
  so.integrator = parse_integrator(a.integrator);
  so.euler_dt_ns = parse_duration_ns(a.euler_dt);
  if (!(so.sample_dt_ns > 0.0) || !(so.euler_dt_ns > 0.0))
    throw UsageError("time steps must be > 0");

  DwState start = centered_state(geom);
  if (a.x0_nm >= 0.0) start.x_m = a.x0_nm * 1e-9;
  if (start.x_m > geom.length_m) throw UsageError("--x0-nm lies beyond the track");

  std::vector<SimJob> jobs;
  for (const auto& w : waves) jobs.push_back({start, w.waveform, mc, geom, so});
  const auto trajs = simulate_batch(jobs, ctx.global.jobs);

  const bool json = ctx.global.format == Format::json;
  ctx.o() << "waveform,file,final_position_m,displacement_m,max_abs_velocity_mps\n";
  for (std::size_t i = 0; i < waves.size(); ++i) {
    const auto& traj = trajs[i];
    const auto path =
        ctx.global.output_dir / (waves[i].label + (json ? ".traj.json" : ".traj.csv"));
    if (json) {
      write_output(path, trajectory_json(traj, ctx, waves[i].label), ctx, "");
    } else {
      std::ostringstream body;
      write_trajectory_csv(body, traj);
      write_output(path, body.str(), ctx);
    }
    double vmax = 0.0;
    for (double v : traj.velocity_mps) vmax = std::max(vmax, std::abs(v));
    ctx.o() << waves[i].label << ',' << path.string() << ','
            << text::format_double(traj.position_m.back()) << ','
            << text::format_double(traj.position_m.back() - traj.position_m.front()) << ','
            << text::format_double(vmax) << '\n';
  }
}

}  // namespace

void register_simulate(CLI::App& app, Context& ctx) {
  auto args = std::make_shared<SimulateArgs>();
  auto* sub = app.add_subcommand("simulate", "Simulate wall trajectories for current waveforms");
  add_constants_options(*sub, args->constants);
  add_geometry_options(*sub, args->geometry);
  add_waveform_options(*sub, args->waveforms);
  sub->add_option("--sample-dt", args->sample_dt, "Output sampling interval")
      ->capture_default_str();
  sub->add_option("--integrator", args->integrator, "exact or euler")
      ->check(CLI::IsMember({"exact", "euler"}))
      ->capture_default_str();
  sub->add_option("--euler-dt", args->euler_dt, "Euler step")->capture_default_str();
  sub->add_option("--x0-nm", args->x0_nm, "Initial wall position (default: track centre)");
  sub->callback([args, &ctx] { run(*args, ctx); });
}

}  // namespace dwkin::cli
