#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tpinn/field_grid.h"
#include "tpinn/hydro.h"
#include "tpinn/moc.h"

namespace tpinn {

// x-range partition used for per-segment reporting (inclusive bounds).
struct Segment {
  std::string name;
  double x_begin = 0.0;
  double x_end = 0.0;
};

// Sidecar record written next to every dataset CSV.
struct DatasetMeta {
  PipelineSpec pipe;
  FluidSpec fluid;
  double wave_speed = 0.0;      // m/s, nominal
  double moc_wave_speed = 0.0;  // m/s, as run on the characteristic grid
  double moc_dt = 0.0;          // s
  double duration = 0.0;        // s
  std::optional<double> offtake_position;
  std::vector<Segment> segments;
};

struct Dataset {
  FieldGrid field;
  DatasetMeta meta;
};

// Header `x_m,t_s,pressure_mpa,velocity_mps`; rows ordered by t then x;
// values printed with 17 significant digits so a read recovers them exactly.
void write_field_csv(const FieldGrid& field, std::ostream& os);
FieldGrid read_field_csv(std::istream& is);

std::filesystem::path meta_path(const std::filesystem::path& csv);

void write_dataset(const std::filesystem::path& csv, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& csv);

// Default G1/G2 style split: at the offtake when present, otherwise a single
// segment covering the whole line.
// Runs the characteristic solver and resamples onto a uniform dx × dt grid
// spanning [0, L] × [0, T].
Dataset make_dataset(const Scenario& scenario, double moc_dt, double dx, double dt);

std::vector<Segment> default_segments(double length, std::optional<double> offtake_position);

}  // namespace tpinn
