#include "tpinn/field_grid.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpinn/errors.h"

namespace tpinn {

FieldGrid::FieldGrid(std::vector<double> xs, std::vector<double> ts)
    : xs_(std::move(xs)), ts_(std::move(ts)) {
  if (xs_.size() < 2) throw ShapeError("field grid needs at least two x positions");
  if (ts_.empty()) throw ShapeError("field grid needs at least one time");
  pressure_.assign(xs_.size() * ts_.size(), 0.0);
  velocity_.assign(xs_.size() * ts_.size(), 0.0);
}

void FieldGrid::validate() const {
  if (xs_.size() < 2 || ts_.empty()) throw ShapeError("field grid axes too short");
  if (pressure_.size() != nx() * nt() || velocity_.size() != nx() * nt()) {
    throw ShapeError("field grid arrays do not match axes");
  }
  for (std::size_t k = 0; k < pressure_.size(); ++k) {
    if (!std::isfinite(pressure_[k]) || !std::isfinite(velocity_[k])) {
      throw DomainError("field grid holds a non-finite value");
    }
  }
}

bool FieldGrid::congruent(const FieldGrid& other) const {
  return xs_ == other.xs_ && ts_ == other.ts_;
}

namespace {

struct Bracket {
  std::size_t lo;
  std::size_t hi;
  double weight;  // of `hi`
};

Bracket locate(const std::vector<double>& axis, double q, const char* name) {
  const double span = axis.back() - axis.front();
  const double slack = 1e-9 * std::max(1.0, std::abs(span));
  if (q < axis.front() - slack || q > axis.back() + slack) {
    std::ostringstream os;
    os << name << " query " << q << " outside [" << axis.front() << ", " << axis.back() << "]";
    throw RangeError(os.str());
  }
  if (axis.size() == 1) return {0, 0, 0.0};
  q = std::clamp(q, axis.front(), axis.back());
  auto it = std::lower_bound(axis.begin(), axis.end(), q);
  std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  if (hi < axis.size() && axis[hi] == q) return {hi, hi, 0.0};
  std::size_t lo = hi - 1;
  return {lo, hi, (q - axis[lo]) / (axis[hi] - axis[lo])};
}

}  // namespace

FieldGrid sample(const FieldGrid& field, const std::vector<double>& xs_out,
                 const std::vector<double>& ts_out) {
  FieldGrid out(xs_out, ts_out);
  std::vector<Bracket> bx, bt;
  bx.reserve(xs_out.size());
  bt.reserve(ts_out.size());
  for (double x : xs_out) bx.push_back(locate(field.xs(), x, "x"));
  for (double t : ts_out) bt.push_back(locate(field.ts(), t, "t"));

  auto lerp2 = [&](auto value, const Bracket& t, const Bracket& x) {
    const double a = value(t.lo, x.lo) * (1.0 - x.weight) + value(t.lo, x.hi) * x.weight;
    const double b = value(t.hi, x.lo) * (1.0 - x.weight) + value(t.hi, x.hi) * x.weight;
    return a * (1.0 - t.weight) + b * t.weight;
  };
  auto p = [&](std::size_t j, std::size_t i) { return field.pressure(j, i); };
  auto v = [&](std::size_t j, std::size_t i) { return field.velocity(j, i); };
  for (std::size_t j = 0; j < ts_out.size(); ++j) {
    for (std::size_t i = 0; i < xs_out.size(); ++i) {
      out.pressure(j, i) = lerp2(p, bt[j], bx[i]);
      out.velocity(j, i) = lerp2(v, bt[j], bx[i]);
    }
  }
  return out;
}

std::vector<double> linspace(double first, double last, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {first};
  std::vector<double> out(count);
  const double step = (last - first) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) out[k] = first + step * static_cast<double>(k);
  out.back() = last;
  return out;
}

std::vector<double> uniform_axis(double extent, double spacing) {
  if (!(spacing > 0.0) || !(extent >= 0.0)) throw DomainError("uniform_axis needs spacing > 0");
  const double steps = extent / spacing;
  const double whole = std::round(steps);
  if (std::abs(steps - whole) > 1e-9 * std::max(1.0, steps)) {
    std::ostringstream os;
    os << "extent " << extent << " is not a whole number of " << spacing << " steps";
    throw DomainError(os.str());
  }
  return linspace(0.0, extent, static_cast<std::size_t>(whole) + 1);
}

}  // namespace tpinn
