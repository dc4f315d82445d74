#pragma once

#include <cmath>

namespace tpinn {

// Forward-mode number carrying the two input tangents d/dx and d/dt.
struct Dual {
  double value = 0.0;
  double dx = 0.0;
  double dt = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v) {}  // NOLINT: constants promote implicitly
  constexpr Dual(double v, double tx, double tt) : value(v), dx(tx), dt(tt) {}

  Dual& operator+=(const Dual& o) { value += o.value; dx += o.dx; dt += o.dt; return *this; }
  Dual& operator-=(const Dual& o) { value -= o.value; dx -= o.dx; dt -= o.dt; return *this; }
  Dual& operator*=(const Dual& o) {
    dx = dx * o.value + value * o.dx;
    dt = dt * o.value + value * o.dt;
    value *= o.value;
    return *this;
  }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator-(const Dual& a) { return {-a.value, -a.dx, -a.dt}; }
inline Dual operator/(const Dual& a, const Dual& b) {
  const double inv = 1.0 / b.value;
  return {a.value * inv, (a.dx - a.value * inv * b.dx) * inv, (a.dt - a.value * inv * b.dt) * inv};
}

// Applies f with f'(value) = slope to a dual.
inline Dual chain(const Dual& a, double f, double slope) { return {f, slope * a.dx, slope * a.dt}; }

inline double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

inline Dual softplus(const Dual& a) { return chain(a, softplus(a.value), sigmoid(a.value)); }
inline Dual tanh(const Dual& a) {
  const double y = std::tanh(a.value);
  return chain(a, y, 1.0 - y * y);
}
inline Dual exp(const Dual& a) {
  const double y = std::exp(a.value);
  return chain(a, y, y);
}
inline Dual sin(const Dual& a) { return chain(a, std::sin(a.value), std::cos(a.value)); }
inline Dual cos(const Dual& a) { return chain(a, std::cos(a.value), -std::sin(a.value)); }

// v·|v|, the friction nonlinearity; derivative 2|v|.
inline double signed_square(double v) { return v * std::abs(v); }
inline Dual signed_square(const Dual& a) {
  return chain(a, a.value * std::abs(a.value), 2.0 * std::abs(a.value));
}

}  // namespace tpinn
