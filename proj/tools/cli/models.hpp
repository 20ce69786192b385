#pragma once

#include <string>
#include <vector>

#include "dwkin/bench.hpp"

namespace dwkin::cli {

/// Known ids: kinematic-exact, kinematic-euler, linear, inertial, cc1d,
/// cc1d-varwidth, cc1d-fitted. Baselines are calibrated at j_ref.
BenchModel make_model(const std::string& id, const ModelConstants& mc, double j_ref,
                      double sample_dt_ns);

std::vector<std::string> split_ids(const std::string& list);

}  // namespace dwkin::cli
