#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dwkin::cli {

/// Runs the command line; returns the process exit code
/// (0 success, 1 runtime failure, 2 usage or configuration error).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dwkin::cli
