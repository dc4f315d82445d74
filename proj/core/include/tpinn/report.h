#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tpinn/checkpoint.h"
#include "tpinn/dataset_io.h"
#include "tpinn/metrics.h"

namespace tpinn {

struct MetricsRow {
  std::string model;
  std::string segment;
  std::string quantity;  // "pressure" [MPa] or "flowrate" [m³/h]
  MetricTriple metrics;  // r2 is NaN when the truth has zero variance
};

struct MetricsReport {
  std::vector<MetricsRow> rows;

  // `model,segment,quantity,rmse,mape_pct,r2`
  void write_csv(std::ostream& os) const;
  // One line per model × segment with pressure and flowrate side by side.
  void write_table(std::ostream& os) const;
  void append(const MetricsReport& other);
};

// Prediction of a checkpoint on the dataset grid, in (P [MPa], v [m/s]).
FieldGrid predict_on(const Checkpoint& ckpt, const Dataset& data);

// Scores `pred` against the dataset on its interior columns, one pair of rows
// (pressure, flowrate) per segment.
MetricsReport evaluate_field(const std::string& model, const FieldGrid& pred, const Dataset& data);
MetricsReport evaluate_model(const Checkpoint& ckpt, const Dataset& data);
MetricsReport compare(const std::vector<Checkpoint>& models, const Dataset& data);

// Interior columns that fall inside a segment (inclusive bounds).
std::vector<std::size_t> segment_columns(const Dataset& data, const Segment& segment);

}  // namespace tpinn
