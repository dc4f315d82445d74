#pragma once

#include <filesystem>
#include <string>

#include "tpinn/network.h"

namespace tpinn {

inline constexpr int kCheckpointVersion = 1;

// A trained model: architecture, input scaling and parameters. The JSON text
// stores doubles in shortest round-trip form, so save → load is bitwise exact.
//
//   { "format": "tpinn-checkpoint", "version": 1, "label": "kih",
//     "spec": { "hidden_layers", "width", "activation", "output_mode",
//               "scaler": { "x_min", "x_max", "t_min", "t_max" } },
//     "layers": [ { "rows", "cols", "weight": [row-major], "bias": [...] } ] }
struct Checkpoint {
  std::string label;  // model name used in reports
  NetSpec spec;
  NetParams params;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tpinn
