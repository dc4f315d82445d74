#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tpinn/losses.h"
#include "tpinn/network.h"

namespace tpinn {

struct FdReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;  // flat parameter index (NetParams::flatten order)
  std::size_t checked = 0;
  std::vector<std::size_t> failing;
  double tolerance = 0.0;
  double step = 0.0;

  bool passed() const { return failing.empty(); }
};

struct FdOptions {
  double step = 1e-4;
  double tolerance = 1e-5;
  // Relative errors use max(|analytic|, |numeric|, floor) as denominator;
  // the floor is this fraction of the largest gradient entry.
  double relative_floor = 1e-6;
  // 0 checks every coordinate, otherwise an evenly strided subset.
  std::size_t max_coordinates = 0;
};

using ScalarLoss = std::function<double(const NetParams&)>;

// Compares `analytic` with central differences of `loss` around `params`.
FdReport fd_check(const NetParams& params, const ScalarLoss& loss, const Gradients& analytic,
                  const FdOptions& options = {});

// Tape gradient of `objective` on `batch` checked against central differences.
FdReport fd_check(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
                  const CollocationSet& batch, const Objective& objective,
                  const FdOptions& options = {});

}  // namespace tpinn
