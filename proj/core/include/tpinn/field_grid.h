#pragma once

#include <cstddef>
#include <vector>

namespace tpinn {

// Pressure [MPa] and velocity [m/s] on a rectangular (x, t) grid. Values are
// stored row-major with time as the slow index: value(j, i) is at (xs[i], ts[j]).
class FieldGrid {
 public:
  FieldGrid() = default;
  FieldGrid(std::vector<double> xs, std::vector<double> ts);

  std::size_t nx() const { return xs_.size(); }
  std::size_t nt() const { return ts_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ts() const { return ts_; }

  double& pressure(std::size_t j, std::size_t i) { return pressure_[j * nx() + i]; }
  double pressure(std::size_t j, std::size_t i) const { return pressure_[j * nx() + i]; }
  double& velocity(std::size_t j, std::size_t i) { return velocity_[j * nx() + i]; }
  double velocity(std::size_t j, std::size_t i) const { return velocity_[j * nx() + i]; }

  const std::vector<double>& pressure_data() const { return pressure_; }
  const std::vector<double>& velocity_data() const { return velocity_; }

  // Throws ShapeError / DomainError when the invariants do not hold.
  void validate() const;
  bool congruent(const FieldGrid& other) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ts_;
  std::vector<double> pressure_;
  std::vector<double> velocity_;
};

// Bilinear resampling onto (xs_out, ts_out); exact at coincident nodes.
// Queries outside the field's bounds raise RangeError.
FieldGrid sample(const FieldGrid& field, const std::vector<double>& xs_out,
                 const std::vector<double>& ts_out);

// `count` evenly spaced values from `first` to `last` inclusive.
std::vector<double> linspace(double first, double last, std::size_t count);

// Uniform grid from 0 to `extent` with the given spacing; the extent must be a
// whole number of steps to within 1e-9 relative.
std::vector<double> uniform_axis(double extent, double spacing);

}  // namespace tpinn
