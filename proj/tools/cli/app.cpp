#include "cli/app.hpp"

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "dwkin/errors.hpp"
#include "dwkin/text.hpp"

namespace dwkin::cli {

std::string config_hash(const CLI::App& app) {
  std::string cfg = app.config_to_str(true, false);
  return text::hex64(text::fnv1a(cfg));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;

  CLI::App app{"Kinematic domain-wall model: simulate, extract, fit, compare, bench",
               "dwkin"};
  ctx.root = &app;
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML configuration file")->check(CLI::ExistingFile);
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::string format = "csv";
  std::string output_dir = ".";
  app.add_option("--jobs,-j", ctx.global.jobs, "Worker threads for batch commands (0: all)")
      ->capture_default_str();
  app.add_option("--output-dir,-o", output_dir, "Directory for output files")
      ->capture_default_str();
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.parse_complete_callback([&] {
    ctx.global.format = format == "json" ? Format::json : Format::csv;
    ctx.global.output_dir = output_dir;
    ctx.config_hash = config_hash(app);
  });

  register_simulate(app, ctx);
  register_extract(app, ctx);
  register_fit(app, ctx);
  register_tables(app, ctx);
  register_compare(app, ctx);
  register_bench(app, ctx);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return ctx.exit_code;
}

}  // namespace dwkin::cli
