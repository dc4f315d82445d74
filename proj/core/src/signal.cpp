#include "tpinn/signal.h"

#include <algorithm>
#include <cmath>

#include "tpinn/errors.h"

namespace tpinn {

Signal::Signal(std::vector<std::pair<double, double>> breakpoints) : points_(std::move(breakpoints)) {
  if (points_.empty()) throw DomainError("signal needs at least one breakpoint");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].first) || !std::isfinite(points_[i].second)) {
      throw DomainError("signal breakpoints must be finite");
    }
    if (i > 0 && points_[i].first < points_[i - 1].first) {
      throw DomainError("signal breakpoint times must be nondecreasing");
    }
  }
}

double Signal::operator()(double t) const {
  if (points_.empty()) throw UsageError("evaluating an empty signal");
  if (t < points_.front().first) return points_.front().second;
  // First breakpoint strictly after t; the segment [it-1, it] contains t.
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double value, const auto& p) { return value < p.first; });
  if (it == points_.end()) return points_.back().second;
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

double Signal::left_limit(double t) const {
  if (points_.empty()) throw UsageError("evaluating an empty signal");
  auto it = std::lower_bound(points_.begin(), points_.end(), t,
                             [](const auto& p, double value) { return p.first < value; });
  if (it == points_.begin()) return points_.front().second;
  if (it == points_.end()) return points_.back().second;
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

Signal Signal::scaled(double factor) const {
  auto pts = points_;
  for (auto& p : pts) p.second *= factor;
  return Signal(std::move(pts));
}

}  // namespace tpinn
