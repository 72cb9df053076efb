#pragma once

#include <string_view>
#include <vector>

#include "mixview/config.hpp"

namespace mixview {

// Frozen experiment presets:
//   desk   - the patch-based multi-view setting at laptop scale; the
//            compare acceptance thresholds are calibrated against it.
//   tiny   - small instance for gradient certification.
//   linear - linear model on the simple two-feature setting.
ExperimentConfig preset(std::string_view name);

std::vector<std::string_view> preset_names();

}  // namespace mixview
