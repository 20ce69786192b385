#pragma once

#include "cli/common.hpp"

namespace dwkin::cli {

void register_simulate(CLI::App& app, Context& ctx);
void register_extract(CLI::App& app, Context& ctx);
void register_fit(CLI::App& app, Context& ctx);
void register_tables(CLI::App& app, Context& ctx);
void register_compare(CLI::App& app, Context& ctx);
void register_bench(CLI::App& app, Context& ctx);

/// Hash of every effective option value, for provenance headers.
std::string config_hash(const CLI::App& app);

}  // namespace dwkin::cli
