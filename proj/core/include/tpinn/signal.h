#pragma once

#include <utility>
#include <vector>

namespace tpinn {

// Piecewise-linear time series through (t, value) breakpoints. Held constant
// outside the breakpoint range. Repeated times encode a jump; the value is
// right-continuous there.
class Signal {
 public:
  Signal() = default;
  explicit Signal(std::vector<std::pair<double, double>> breakpoints);
  static Signal constant(double value) { return Signal({{0.0, value}}); }

  double operator()(double t) const;
  // Limit from the left; differs from operator() only at a jump.
  double left_limit(double t) const;
  const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }
  bool empty() const { return points_.empty(); }

  Signal scaled(double factor) const;

 private:
  std::vector<std::pair<double, double>> points_;
};

}  // namespace tpinn
