#pragma once

#include <nlohmann/json.hpp>

#include "amodal/core/types.hpp"

namespace amodal {

nlohmann::json config_to_json(const PipelineConfig& config);

/// Overlay the keys present in `j` onto `base`; unknown keys are an error.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});

}  // namespace amodal
