#include <CLI11.hpp>
#include <fstream>
#include <memory>
#include <sstream>

#include "cli/commands.hpp"
#include "dwkin/extraction.hpp"
#include "dwkin/mag_table.hpp"
#include "dwkin/text.hpp"

namespace dwkin::cli {

namespace {

struct ExtractArgs {
  std::vector<std::string> inputs;
  double spacing_nm = 1.0;
  std::size_t lag = 2;
  std::string shift = "auto";
  bool no_range_check = false;
  bool group = false;
};

/// Trial name for output files: the file stem, or the folder for table.txt.
std::string trial_name(const std::filesystem::path& p) {
  if (p.filename() == "table.txt" && p.has_parent_path())
    return p.parent_path().filename().string();
  return p.stem().string();
}

void run(const ExtractArgs& a, Context& ctx) {
  std::vector<std::filesystem::path> files;
  for (const auto& pattern : a.inputs) {
    auto matched = expand_glob(pattern);
    if (matched.empty()) throw UsageError("no files match '" + pattern + "'");
    files.insert(files.end(), matched.begin(), matched.end());
  }
  MagTableOptions opts;
  opts.spacing_m = a.spacing_nm * 1e-9;
  opts.check_range = !a.no_range_check;
  opts.shift = a.shift == "present"  ? ShiftColumns::present
               : a.shift == "absent" ? ShiftColumns::absent
                                     : ShiftColumns::auto_detect;
  if (!(opts.spacing_m > 0.0)) throw UsageError("--spacing-nm must be > 0");

  std::vector<std::string> outputs(files.size());
  std::vector<std::string> errors(files.size());
  parallel_for(
      files.size(), ctx.global.jobs,
      [&](std::size_t i) {
        const auto& f = files[i];
        const auto meta = trial_meta_for_path(f);
        const auto table = read_mag_table(f, opts);
        const auto motion = extract_motion(table, a.lag);
        std::vector<std::string> comments{
            "trial=" + trial_name(f), "J=" + text::format_double(meta.j),
            "RT=" + text::format_double(meta.run_time_s)};
        if (meta.corner) comments.push_back("corner=" + meta.corner->to_string());
        std::ostringstream body;
        write_motion_csv(body, motion, comments);
        auto dir = ctx.global.output_dir;
        if (a.group) dir /= meta.corner ? meta.corner->to_string() : "unknown_corner";
        const auto out = dir / (trial_name(f) + ".motion.csv");
        write_output(out, body.str(), ctx);
        outputs[i] = out.string();
      },
      [&](std::size_t i, const std::string& what) { errors[i] = what; });

  std::size_t failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!errors[i].empty()) {
      ++failed;
      ctx.e() << "error: " << files[i].string() << ": " << errors[i] << '\n';
    } else {
      ctx.o() << files[i].string() << " -> " << outputs[i] << '\n';
    }
  }
  if (failed > 0) {
    ctx.e() << failed << " of " << files.size() << " files failed\n";
    ctx.fail();
  }
}

}  // namespace

void register_extract(CLI::App& app, Context& ctx) {
  auto args = std::make_shared<ExtractArgs>();
  auto* sub = app.add_subcommand("extract", "Extract wall position and velocity from tables");
  sub->add_option("inputs", args->inputs, "Table files or glob patterns")->required();
  sub->add_option("--spacing-nm", args->spacing_nm, "Cell spacing of the profile columns")
      ->capture_default_str();
  sub->add_option("--lag", args->lag, "Velocity difference lag in samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--shift", args->shift, "Window shift columns")
      ->check(CLI::IsMember({"auto", "present", "absent"}))
      ->capture_default_str();
  sub->add_flag("--no-range-check", args->no_range_check,
                "Accept magnetization outside [-1, 1]");
  sub->add_flag("--group", args->group, "Write into one sub-folder per corner");
  sub->callback([args, &ctx] { run(*args, ctx); });
}

}  // namespace dwkin::cli
