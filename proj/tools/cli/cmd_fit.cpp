#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>

#include "cli/commands.hpp"
#include "dwkin/extraction.hpp"
#include "dwkin/fitting.hpp"
#include "dwkin/mag_table.hpp"
#include "dwkin/text.hpp"

namespace dwkin::cli {

namespace {

struct FitArgs {
  std::vector<std::string> folders;
  std::size_t smooth = 150;
  double j_cap = 4e10;
  std::size_t min_trials = 4;
  std::string corner;
};

constexpr std::string_view kMotionSuffix = ".motion.csv";

// The trial name recorded by `extract`, else the file name without suffix.
std::string motion_trial_name(const std::filesystem::path& p, std::istream& in) {
  std::string line;
  const auto start = in.tellg();
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (t.front() != '#') break;
    const auto body = text::trim(t.substr(1));
    if (body.starts_with("trial=")) {
      in.clear();
      in.seekg(start);
      return std::string(body.substr(6));
    }
  }
  in.clear();
  in.seekg(start);
  auto name = p.filename().string();
  if (name.ends_with(kMotionSuffix)) name.resize(name.size() - kMotionSuffix.size());
  return name;
}

struct CornerOutcome {
  std::string folder;
  std::optional<FittedCorner> fit;
  std::vector<TrialFeatures> features;
  std::string skipped;  // warning text when skipped
};

CornerOutcome fit_folder(const std::filesystem::path& folder, const FitArgs& a,
                         const std::optional<CornerKey>& override_key) {
  CornerOutcome out;
  out.folder = folder.string();
  if (!std::filesystem::is_directory(folder))
    throw std::runtime_error("not a directory: " + folder.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(folder))
    if (e.is_regular_file() && e.path().filename().string().ends_with(kMotionSuffix))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::optional<CornerKey> key = override_key;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw std::runtime_error("cannot open " + f.string());
    const auto meta = parse_trial_name(motion_trial_name(f, in));
    if (!override_key && meta.corner) {
      if (key && *key != *meta.corner)
        throw std::runtime_error("mixed corners in one folder: " + key->to_string() +
                                 " and " + meta.corner->to_string() + " (" +
                                 f.filename().string() + ")");
      key = meta.corner;
    }
    try {
      out.features.push_back(analyze_trial(read_motion_csv(in), meta, a.smooth));
    } catch (const std::exception& e) {
      throw std::runtime_error(f.filename().string() + ": " + e.what());
    }
  }
  if (out.features.size() < a.min_trials) {
    out.skipped = "corner folder " + folder.string() + " has " +
                  std::to_string(out.features.size()) + " trials, need " +
                  std::to_string(a.min_trials) + "; skipped";
    return out;
  }
  if (!key)
    throw std::runtime_error("no corner tokens in trial names; pass --corner");
  FitOptions fo;
  fo.j_cap = a.j_cap;
  fo.min_trials = a.min_trials;
  try {
    out.fit = fit_corner(out.features, fo);
  } catch (const std::invalid_argument& e) {
    // Too few trials left after capping and truncation.
    out.skipped = "corner folder " + folder.string() + ": " + e.what() + "; skipped";
    return out;
  }
  out.fit->corner = key;
  return out;
}

void report(const std::vector<CornerOutcome>& outcomes, const Context& ctx) {
  if (ctx.global.format == Format::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) {
      if (!o.fit) continue;
      const auto& f = *o.fit;
      const auto& d = f.diagnostics;
      nlohmann::ordered_json j;
      j["folder"] = o.folder;
      j["corner"] = f.corner->to_string();
      j["c"] = f.c;
      j["drift_const_ns"] = f.drift_const_ns;
      j["d1_per_ns"] = f.d1();
      j["d2"] = f.d2;
      j["k"] = f.constants().k();
      j["n_input"] = d.n_input;
      j["n_used"] = d.n_used;
      j["dropped_by_cap"] = d.dropped_by_cap;
      j["truncated_at"] = d.truncated_at ? nlohmann::ordered_json(*d.truncated_at)
                                         : nlohmann::ordered_json(nullptr);
      j["cubic_rel_residuals"] = d.cubic_rel_residuals;
      j["drift_residuals_nm"] = d.drift_residuals_nm;
      j["d2_unclamped"] = d.d2_unclamped;
      j["d2_clamped"] = d.d2_clamped;
      j["notes"] = d.notes;
      arr.push_back(j);
    }
    nlohmann::ordered_json root;
    root["provenance"] = provenance_line(ctx);
    root["corners"] = arr;
    ctx.o() << root.dump(2) << '\n';
    return;
  }
  ctx.o() << "corner,n_used,c0,c1,c2,c3,drift_const_ns,d1_per_ns,d2,max_abs_cubic_residual,"
             "d2_clamped\n";
  for (const auto& o : outcomes) {
    if (!o.fit) continue;
    const auto& f = *o.fit;
    double worst = 0.0;
    for (double r : f.diagnostics.cubic_rel_residuals) worst = std::max(worst, std::abs(r));
    ctx.o() << '"' << f.corner->to_string() << "\"," << f.diagnostics.n_used;
    for (double c : f.c) ctx.o() << ',' << text::format_double(c);
    ctx.o() << ',' << text::format_double(f.drift_const_ns) << ','
            << text::format_double(f.d1()) << ',' << text::format_double(f.d2) << ','
            << text::format_double(worst) << ',' << (f.diagnostics.d2_clamped ? 1 : 0)
            << '\n';
  }
}

void run(const FitArgs& a, Context& ctx) {
  std::optional<CornerKey> override_key;
  if (!a.corner.empty()) {
    try {
      override_key = CornerKey::parse(a.corner);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<CornerOutcome> outcomes(a.folders.size());
  std::vector<std::string> errors(a.folders.size());
  parallel_for(
      a.folders.size(), ctx.global.jobs,
      [&](std::size_t i) { outcomes[i] = fit_folder(a.folders[i], a, override_key); },
      [&](std::size_t i, const std::string& what) { errors[i] = what; });

  std::vector<std::pair<CornerKey, FittedValues>> rows;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < a.folders.size(); ++i) {
    if (!errors[i].empty()) {
      ++failed;
      ctx.e() << "error: corner folder " << a.folders[i] << ": " << errors[i] << '\n';
      continue;
    }
    const auto& o = outcomes[i];
    if (!o.skipped.empty()) {
      ctx.e() << "warning: " << o.skipped << '\n';
      continue;
    }
    for (const auto& note : o.fit->diagnostics.notes)
      ctx.e() << "note: " << o.fit->corner->to_string() << ": " << note << '\n';

    std::ostringstream feats;
    write_features_csv(feats, o.features);
    const auto stem = std::filesystem::path(a.folders[i]).filename().string();
    write_output(ctx.global.output_dir / (stem + ".features.csv"), feats.str(), ctx);

    FittedValues fv{o.fit->c, o.fit->drift_const_ns, o.fit->d2};
    for (const auto& r : rows)
      if (r.first == *o.fit->corner) {
        ++failed;
        ctx.e() << "error: corner " << r.first.to_string() << " fitted twice\n";
      }
    rows.emplace_back(*o.fit->corner, fv);
  }
  report(outcomes, ctx);
  if (rows.empty()) {
    ctx.e() << "error: no corner could be fitted\n";
    ctx.fail();
    return;
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  rows.erase(std::unique(rows.begin(), rows.end(),
                         [](const auto& x, const auto& y) { return x.first == y.first; }),
             rows.end());
  const auto set = TableSet::from_corners(rows);
  for (auto name : kAllConstants) {
    std::ostringstream body;
    write_tbl(body, set.table(name));
    write_output(ctx.global.output_dir / table_file_name(name), body.str(), ctx);
  }
  if (failed > 0) ctx.fail();
}

}  // namespace

void register_fit(CLI::App& app, Context& ctx) {
  auto args = std::make_shared<FitArgs>();
  auto* sub = app.add_subcommand("fit", "Fit kinematic constants per corner and write tables");
  sub->add_option("folders", args->folders, "Corner folders holding *.motion.csv trials")
      ->required();
  sub->add_option("--smooth", args->smooth, "Gaussian smoothing window in samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--j-cap", args->j_cap, "Keep trials up to the first with J at or above")
      ->capture_default_str();
  sub->add_option("--min-trials", args->min_trials, "Minimum trials per corner")
      ->check(CLI::Range(4, 1000))
      ->capture_default_str();
  sub->add_option("--corner", args->corner,
                  "Corner key for folders whose trial names carry no corner tokens");
  sub->callback([args, &ctx] { run(*args, ctx); });
}

}  // namespace dwkin::cli
