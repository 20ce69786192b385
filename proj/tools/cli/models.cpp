#include "cli/models.hpp"

#include <algorithm>

#include "cli/common.hpp"
#include "dwkin/text.hpp"

namespace dwkin::cli {

BenchModel make_model(const std::string& id, const ModelConstants& mc, double j_ref,
                      double sample_dt_ns) {
  if (id == "kinematic-exact") return KinematicBenchModel{mc, Integrator::exact};
  if (id == "kinematic-euler") return KinematicBenchModel{mc, Integrator::euler};
  if (id == "linear") return BaselineModel{calibrate_linear(mc, j_ref)};
  if (id == "inertial") return BaselineModel{calibrate_inertial(mc, j_ref)};
  CollectiveCoordinateModel base;
  base.max_dt_ns = sample_dt_ns;
  if (id == "cc1d") return BaselineModel{calibrate_cc(mc, j_ref, base)};
  if (id == "cc1d-varwidth") {
    base.variant = CcVariant::variable_width;
    return BaselineModel{calibrate_cc(mc, j_ref, base)};
  }
  if (id == "cc1d-fitted") {
    auto m = fit_cc(mc, j_ref, base);
    m.max_dt_ns = sample_dt_ns;
    return BaselineModel{m};
  }
  throw UsageError("unknown model '" + id + "'");
}

std::vector<std::string> split_ids(const std::string& list) {
  std::vector<std::string> out;
  for (auto f : text::split_fields(list))
    if (!f.empty()) out.emplace_back(f);
  if (out.empty()) throw UsageError("empty model list");
  return out;
}

}  // namespace dwkin::cli
