#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tpinn/field_grid.h"

namespace tpinn {

inline constexpr double kMapeFloor = 1e-9;

struct MapeResult {
  double percent = 0.0;
  std::size_t skipped = 0;  // truth values with |y| <= floor
};

double rmse(std::span<const double> pred, std::span<const double> truth);
// Points with |truth| <= floor are left out and counted in `skipped`.
MapeResult mape(std::span<const double> pred, std::span<const double> truth,
                double floor = kMapeFloor);
// 1 - SS_res / SS_tot; throws UndefinedMetric when the truth has zero variance.
double r2(std::span<const double> pred, std::span<const double> truth);

struct MetricTriple {
  double rmse = 0.0;
  double mape_pct = 0.0;
  double r2 = 1.0;
  std::size_t mape_skipped = 0;
};

MetricTriple evaluate_metrics(std::span<const double> pred, std::span<const double> truth);

// Mean absolute pressure residual per time step (over `columns`) and per
// column (over time).
struct ResidualSeries {
  std::vector<double> ts;
  std::vector<double> per_time;
  std::vector<double> xs;
  std::vector<double> per_location;

  double max_per_time() const;
};

ResidualSeries residual_series(const FieldGrid& pred, const FieldGrid& truth,
                               const std::vector<std::size_t>& columns);

}  // namespace tpinn
