#pragma once

#include <utility>
#include <vector>

#include "dwkin/lookup.hpp"

namespace dwkin::cli {

/// Placeholder constants for the 32 corners of the micromagnetic sweep
/// (W, Msat, B_anis, alpha and Aex at two levels each). They are smooth
/// made-up functions of the corner, not fitted values.
std::vector<std::pair<CornerKey, FittedValues>> synthetic_corners();

}  // namespace dwkin::cli
