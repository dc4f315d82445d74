#include "tpinn/metrics.h"

#include <algorithm>
#include <cmath>

#include "tpinn/errors.h"

namespace tpinn {

namespace {

void require_pair(std::span<const double> pred, std::span<const double> truth, std::size_t min) {
  if (pred.size() != truth.size()) throw ShapeError("prediction and truth differ in length");
  if (pred.size() < min) throw DomainError("metric needs more samples");
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> truth) {
  require_pair(pred, truth, 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double e = pred[k] - truth[k];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

MapeResult mape(std::span<const double> pred, std::span<const double> truth, double floor) {
  require_pair(pred, truth, 1);
  MapeResult r;
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (std::abs(truth[k]) <= floor) {
      ++r.skipped;
      continue;
    }
    acc += std::abs(pred[k] - truth[k]) / std::abs(truth[k]);
    ++used;
  }
  r.percent = used ? 100.0 * acc / static_cast<double>(used) : 0.0;
  return r;
}

double r2(std::span<const double> pred, std::span<const double> truth) {
  require_pair(pred, truth, 2);
  double mean = 0.0;
  for (double y : truth) mean += y;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    ss_res += (pred[k] - truth[k]) * (pred[k] - truth[k]);
    ss_tot += (truth[k] - mean) * (truth[k] - mean);
  }
  if (ss_tot == 0.0) throw UndefinedMetric("R^2 is undefined for a constant truth series");
  return 1.0 - ss_res / ss_tot;
}

MetricTriple evaluate_metrics(std::span<const double> pred, std::span<const double> truth) {
  MetricTriple m;
  m.rmse = rmse(pred, truth);
  const MapeResult mp = mape(pred, truth);
  m.mape_pct = mp.percent;
  m.mape_skipped = mp.skipped;
  m.r2 = r2(pred, truth);
  return m;
}

double ResidualSeries::max_per_time() const {
  return per_time.empty() ? 0.0 : *std::max_element(per_time.begin(), per_time.end());
}

ResidualSeries residual_series(const FieldGrid& pred, const FieldGrid& truth,
                               const std::vector<std::size_t>& columns) {
  if (!pred.congruent(truth)) throw ShapeError("residual_series: grids are not congruent");
  if (columns.empty()) throw DomainError("residual_series: no columns selected");
  ResidualSeries s;
  s.ts = truth.ts();
  s.per_time.assign(truth.nt(), 0.0);
  s.per_location.assign(columns.size(), 0.0);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] >= truth.nx()) throw ShapeError("residual_series: column out of range");
    s.xs.push_back(truth.xs()[columns[c]]);
  }
  for (std::size_t j = 0; j < truth.nt(); ++j) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double e = std::abs(pred.pressure(j, columns[c]) - truth.pressure(j, columns[c]));
      s.per_time[j] += e;
      s.per_location[c] += e;
    }
    s.per_time[j] /= static_cast<double>(columns.size());
  }
  for (double& v : s.per_location) v /= static_cast<double>(truth.nt());
  return s;
}

}  // namespace tpinn
