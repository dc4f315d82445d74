#pragma once

#include <json.hpp>

#include "tpinn/hydro.h"
#include "tpinn/signal.h"

namespace tpinn::detail {

nlohmann::json fluid_to_json(const FluidSpec& fluid);
nlohmann::json pipe_to_json(const PipelineSpec& pipe);
FluidSpec fluid_from_json(const nlohmann::json& j);
// "friction_factor": "auto" sets *friction_auto (and is an error when it is null).
PipelineSpec pipe_from_json(const nlohmann::json& j, bool* friction_auto);

nlohmann::json signal_to_json(const Signal& s, double scale = 1.0);
Signal signal_from_json(const nlohmann::json& j, double scale = 1.0);

// Throws ConfigError if `j` has a key outside `allowed`.
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const char* where);

}  // namespace tpinn::detail
