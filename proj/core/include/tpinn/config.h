#pragma once

#include <filesystem>
#include <string>

#include "tpinn/moc.h"
#include "tpinn/trainer.h"

namespace tpinn {

// Everything `generate` needs: the physical scenario, the characteristic time
// step, and the export grid.
struct GenerateConfig {
  Scenario scenario;
  double moc_dt = 0.1;      // s
  double dataset_dx = 1000.0;  // m
  double dataset_dt = 0.5;     // s
};

// JSON text. Unknown keys are rejected so that typos do not silently fall
// back to defaults. See docs/config.md for the key reference.
GenerateConfig parse_generate_config(const std::string& text);
GenerateConfig load_generate_config(const std::filesystem::path& path);
std::string dump_generate_config(const GenerateConfig& config);

TrainConfig parse_train_config(const std::string& text);
TrainConfig load_train_config(const std::filesystem::path& path);
std::string dump_train_config(const TrainConfig& config);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace tpinn
