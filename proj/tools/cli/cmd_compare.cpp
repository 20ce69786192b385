#include <CLI11.hpp>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/models.hpp"
#include "dwkin/metrics.hpp"
#include "dwkin/text.hpp"

namespace dwkin::cli {

namespace {

struct CompareArgs {
  ConstantsSource constants;
  GeometryOptions geometry;
  WaveformOptions waveforms;
  std::string models = "linear,inertial,cc1d,cc1d-varwidth,cc1d-fitted";
  double j_ref = 0.0;
  std::string sample_dt = "0.01ns";
  std::string report;
};

constexpr const char* kReferenceNote =
    "reference is the kinematic model with the exact integrator "
    "(stands in for micromagnetic data)";

struct Row {
  std::string model;
  std::string waveform;
  ErrorReport rep;
};

void run(const CompareArgs& a, Context& ctx) {
  const auto mc = resolve_constants(a.constants, ctx);
  const auto geom = a.geometry.geometry();
  const auto waves = load_waveforms(a.waveforms);
  const double dt = parse_duration_ns(a.sample_dt);
  if (!(dt > 0.0)) throw UsageError("--sample-dt must be > 0");
  const double j_ref = a.j_ref != 0.0 ? a.j_ref : waves.front().waveform.max_abs_current();
  if (j_ref == 0.0) throw UsageError("cannot calibrate baselines at J = 0; pass --j-ref");

  const auto ids = split_ids(a.models);
  std::vector<BenchModel> models;
  for (const auto& id : ids) models.push_back(make_model(id, mc, j_ref, dt));

  const DwState start = centered_state(geom);
  SimOptions so;
  so.sample_dt_ns = dt;
  std::vector<Trajectory> refs(waves.size());
  for (std::size_t w = 0; w < waves.size(); ++w)
    refs[w] = simulate(start, waves[w].waveform, mc, geom, so);

  std::vector<Row> rows(models.size() * waves.size());
  std::vector<std::string> errors(rows.size());
  parallel_for(
      rows.size(), ctx.global.jobs,
      [&](std::size_t i) {
        const auto m = i / waves.size();
        const auto w = i % waves.size();
        Trajectory cand;
        if (const auto* k = std::get_if<KinematicBenchModel>(&models[m])) {
          SimOptions o = so;
          o.integrator = k->integrator;
          cand = simulate(start, waves[w].waveform, k->constants, geom, o);
        } else {
          cand = simulate_baseline(std::get<BaselineModel>(models[m]), start,
                                   waves[w].waveform, geom, dt);
        }
        rows[i] = {ids[m], waves[w].label,
                   error_report(cand, refs[w], waves[w].pulse_end_ns)};
      },
      [&](std::size_t i, const std::string& what) { errors[i] = what; });

  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!errors[i].empty()) {
      ctx.e() << "error: " << ids[i / waves.size()] << " on "
              << waves[i % waves.size()].label << ": " << errors[i] << '\n';
      ctx.fail();
    }

  std::string body;
  if (ctx.global.format == Format::json) {
    nlohmann::ordered_json root;
    root["provenance"] = provenance_line(ctx);
    root["reference"] = "kinematic-exact";
    root["note"] = kReferenceNote;
    root["j_ref_Apm2"] = j_ref;
    root["sample_dt_ns"] = dt;
    root["results"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!errors[i].empty()) continue;
      const auto& r = rows[i];
      root["results"].push_back({{"model", r.model},
                                 {"waveform", r.waveform},
                                 {"final_displacement_err", r.rep.final_displacement_err},
                                 {"max_velocity_err", r.rep.max_velocity_err},
                                 {"rms_rise_m", r.rep.rms_rise_m},
                                 {"rms_stop_m", r.rep.rms_stop_m}});
    }
    body = root.dump(2) + "\n";
  } else {
    std::ostringstream s;
    s << "# " << kReferenceNote << "; j_ref=" << text::format_double(j_ref) << '\n';
    s << "model,waveform,final_displacement_err,max_velocity_err,rms_rise_m,rms_stop_m\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!errors[i].empty()) continue;
      const auto& r = rows[i];
      s << r.model << ',' << r.waveform << ',' << text::format_double(r.rep.final_displacement_err)
        << ',' << text::format_double(r.rep.max_velocity_err) << ','
        << text::format_double(r.rep.rms_rise_m) << ',' << text::format_double(r.rep.rms_stop_m)
        << '\n';
    }
    body = s.str();
  }
  if (!a.report.empty())
    write_output(ctx.global.output_dir / a.report, body, ctx,
                 ctx.global.format == Format::json ? "" : "#");
  ctx.o() << body;
}

}  // namespace

void register_compare(CLI::App& app, Context& ctx) {
  auto args = std::make_shared<CompareArgs>();
  auto* sub = app.add_subcommand("compare", "Error metrics of baseline models against the kinematic model");
  add_constants_options(*sub, args->constants);
  add_geometry_options(*sub, args->geometry);
  add_waveform_options(*sub, args->waveforms);
  sub->add_option("--models", args->models, "Comma-separated model ids")->capture_default_str();
  sub->add_option("--j-ref", args->j_ref,
                  "Baseline calibration current density (default: peak |J| of the first waveform)");
  sub->add_option("--sample-dt", args->sample_dt, "Sampling interval")->capture_default_str();
  sub->add_option("--report", args->report, "Also write the report to this file in --output-dir");
  sub->callback([args, &ctx] { run(*args, ctx); });
}

}  // namespace dwkin::cli
