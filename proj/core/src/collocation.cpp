#include "tpinn/losses.h"

#include <cmath>
#include <sstream>

#include "tpinn/errors.h"

namespace tpinn {

void CollocationSet::validate(double length, double t0) const {
  if (xf.size() != tf.size()) throw ShapeError("collocation xs and ts differ in length");
  const double tol = 1e-9 * std::max(1.0, length);
  for (const auto& s : boundary) {
    if (std::abs(s.x) > tol && std::abs(s.x - length) > tol) {
      std::ostringstream os;
      os << "boundary sample at x = " << s.x << " is not at a pipe end";
      throw DomainError(os.str());
    }
  }
  for (const auto& s : initial) {
    if (std::abs(s.t - t0) > 1e-9) throw DomainError("initial sample not at the initial time");
  }
  for (double x : xf) {
    if (!(x > tol && x < length - tol)) throw DomainError("collocation point outside the interior");
  }
}

std::vector<std::size_t> interior_columns(const FieldGrid& field,
                                          std::optional<double> offtake_position) {
  const auto& xs = field.xs();
  std::optional<std::size_t> skip;
  if (offtake_position) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (std::abs(xs[i] - *offtake_position) < std::abs(xs[best] - *offtake_position)) best = i;
    }
    skip = best;
  }
  std::vector<std::size_t> cols;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (skip && i == *skip) continue;
    cols.push_back(i);
  }
  return cols;
}

CollocationSet build_collocation(const FieldGrid& field, std::optional<double> offtake_position) {
  CollocationSet set;
  const auto& xs = field.xs();
  const auto& ts = field.ts();
  const std::size_t last = xs.size() - 1;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (std::size_t i : {std::size_t{0}, last}) {
      set.boundary.push_back({xs[i], ts[j], field.pressure(j, i), field.velocity(j, i)});
    }
  }
  const auto cols = interior_columns(field, offtake_position);
  for (std::size_t i : cols) {
    set.initial.push_back({xs[i], ts[0], field.pressure(0, i), field.velocity(0, i)});
  }
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (std::size_t i : cols) {
      set.xf.push_back(xs[i]);
      set.tf.push_back(ts[j]);
    }
  }
  return set;
}

}  // namespace tpinn
