#include <CLI11.hpp>
#include <json.hpp>
#include <map>
#include <memory>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/synth.hpp"
#include "dwkin/errors.hpp"
#include "dwkin/text.hpp"

namespace dwkin::cli {

namespace {

using text::format_double;

TableSet load_set(const std::string& dir) {
  try {
    return TableSet::load(dir);
  } catch (const std::invalid_argument& e) {
    throw UsageError(dir + ": " + e.what());
  }
}

void save_set(const TableSet& set, const Context& ctx) {
  for (auto name : kAllConstants) {
    std::ostringstream body;
    write_tbl(body, set.table(name));
    write_output(ctx.global.output_dir / table_file_name(name), body.str(), ctx);
  }
}

nlohmann::ordered_json values_json(const FittedValues& v) {
  nlohmann::ordered_json j;
  for (auto n : kAllConstants) j[std::string(constant_label(n))] = v.get(n);
  const auto mc = v.constants();
  j["d1_per_ns"] = mc.d1();
  j["k"] = mc.k();
  return j;
}

void inspect(const std::string& dir, const Context& ctx) {
  const auto set = load_set(dir);
  if (ctx.global.format == Format::json) {
    nlohmann::ordered_json root;
    root["provenance"] = provenance_line(ctx);
    root["corners"] = nlohmann::ordered_json::array();
    for (const auto& key : set.keys()) {
      auto j = values_json(*set.at(key));
      j["corner"] = key.to_string();
      root["corners"].push_back(j);
    }
    ctx.o() << root.dump(2) << '\n';
    return;
  }
  ctx.o() << "# " << set.keys().size() << " corners\n";
  ctx.o() << "Aex_scaled,B_anis_mT,alpha,Msat,W_nm,c0,c1,c2,c3,drift_const,d2,d1_per_ns\n";
  for (const auto& key : set.keys()) {
    const auto v = *set.at(key);
    ctx.o() << format_double(key.aex_scaled) << ',' << format_double(key.b_anis_mT) << ','
            << format_double(key.alpha) << ',' << format_double(key.msat) << ','
            << format_double(key.width_nm);
    for (auto n : kAllConstants) ctx.o() << ',' << format_double(v.get(n));
    ctx.o() << ',' << format_double(1.0 / v.drift_const_ns) << '\n';
  }
}

void merge(const std::vector<std::string>& dirs, Context& ctx) {
  std::map<CornerKey, FittedValues> merged;
  std::size_t conflicts = 0;
  for (const auto& d : dirs) {
    const auto set = load_set(d);
    for (const auto& key : set.keys()) {
      const auto v = *set.at(key);
      auto [it, inserted] = merged.emplace(key, v);
      if (inserted) continue;
      bool same = true;
      for (auto n : kAllConstants) same = same && it->second.get(n) == v.get(n);
      if (!same) {
        ++conflicts;
        ctx.e() << "error: corner " << key.to_string() << " differs in " << d << '\n';
      }
    }
  }
  if (conflicts > 0) {
    ctx.fail();
    return;
  }
  std::vector<std::pair<CornerKey, FittedValues>> rows(merged.begin(), merged.end());
  save_set(TableSet::from_corners(rows), ctx);
  ctx.o() << "merged " << rows.size() << " corners into " << ctx.global.output_dir.string()
          << '\n';
}

void lookup(const std::string& dir, const std::string& corner, const std::string& mode,
            const Context& ctx) {
  const auto set = load_set(dir);
  CornerKey key;
  try {
    key = CornerKey::parse(corner);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  LookupResult res;
  try {
    res = lookup_constants(key, set, parse_lookup_mode(mode));
  } catch (const NotFoundError& e) {
    throw UsageError(e.what());
  }
  const auto& d = res.diagnostics;
  if (ctx.global.format == Format::json) {
    auto j = values_json(res.values);
    j["corner"] = key.to_string();
    j["mode"] = mode;
    j["exact_hit"] = d.exact_hit;
    j["nearest"] = d.nearest ? nlohmann::ordered_json(d.nearest->to_string())
                             : nlohmann::ordered_json(nullptr);
    j["clamped"] = d.clamped;
    j["provenance"] = provenance_line(ctx);
    ctx.o() << j.dump(2) << '\n';
    return;
  }
  ctx.o() << "name,value\n";
  for (auto n : kAllConstants)
    ctx.o() << constant_label(n) << ',' << format_double(res.values.get(n)) << '\n';
  const auto mc = res.values.constants();
  ctx.o() << "d1," << format_double(mc.d1()) << '\n';
  for (std::size_t i = 0; i < 5; ++i)
    ctx.o() << 'k' << i << ',' << format_double(mc.k()[i]) << '\n';
  if (d.nearest) ctx.e() << "note: nearest corner " << d.nearest->to_string() << '\n';
  if (d.any_clamped()) ctx.e() << "warning: interpolation clamped to the grid\n";
}

}  // namespace

void register_tables(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("tables", "Inspect, merge, query or regenerate lookup tables");
  sub->require_subcommand(1);

  auto inspect_dir = std::make_shared<std::string>();
  auto* ins = sub->add_subcommand("inspect", "List corners and constants");
  ins->add_option("dir", *inspect_dir, "Table directory")->required();
  ins->callback([inspect_dir, &ctx] { inspect(*inspect_dir, ctx); });

  auto merge_dirs = std::make_shared<std::vector<std::string>>();
  auto* mer = sub->add_subcommand("merge", "Union of table sets into --output-dir");
  mer->add_option("dirs", *merge_dirs, "Table directories")->required();
  mer->callback([merge_dirs, &ctx] { merge(*merge_dirs, ctx); });

  struct LookupArgs {
    std::string dir, corner, mode = "exact";
  };
  auto la = std::make_shared<LookupArgs>();
  auto* lk = sub->add_subcommand("lookup", "Constants for one corner");
  lk->add_option("dir", la->dir, "Table directory")->required();
  lk->add_option("--corner", la->corner, "Corner key")->required();
  lk->add_option("--mode", la->mode, "exact, nearest or multilinear")
      ->check(CLI::IsMember({"exact", "nearest", "multilinear"}))
      ->capture_default_str();
  lk->callback([la, &ctx] { lookup(la->dir, la->corner, la->mode, ctx); });

  auto* syn = sub->add_subcommand("synth", "Write the bundled placeholder tables to --output-dir");
  syn->callback([&ctx] {
    save_set(TableSet::from_corners(synthetic_corners()), ctx);
    ctx.o() << "wrote 32 placeholder corners to " << ctx.global.output_dir.string() << '\n';
  });
}

}  // namespace dwkin::cli
