#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpinn {

// Base of every error the library throws. `category()` is a short stable tag
// ("domain", "io", ...) that the CLI prints as `error: <category>: <what>`.
class Error : public std::runtime_error {
 public:
  Error(std::string_view category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

// Invalid argument to a pure function (non-positive density, empty set, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Darcy steady state would need negative pressure somewhere on the line.
class InfeasibleSteadyState : public Error {
 public:
  explicit InfeasibleSteadyState(const std::string& what) : Error("infeasible", what) {}
};

class GridTooCoarse : public Error {
 public:
  explicit GridTooCoarse(const std::string& what) : Error("grid", what) {}
};

class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, long step) : Error("numeric", what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error("range", what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape", what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// R² on a target with zero variance.
class UndefinedMetric : public Error {
 public:
  explicit UndefinedMetric(const std::string& what) : Error("metric", what) {}
};

}  // namespace tpinn
