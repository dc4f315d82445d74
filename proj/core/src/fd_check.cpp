#include "tpinn/fd_check.h"

#include <algorithm>
#include <cmath>

#include "tpinn/errors.h"

namespace tpinn {

FdReport fd_check(const NetParams& params, const ScalarLoss& loss, const Gradients& analytic,
                  const FdOptions& options) {
  if (!(options.step > 0.0)) throw DomainError("finite-difference step must be positive");
  if (!params.same_shape(analytic)) throw ShapeError("gradient shape does not match parameters");

  const std::vector<double> base = params.flatten();
  const std::vector<double> grad = analytic.flatten();
  double scale = 0.0;
  for (double g : grad) scale = std::max(scale, std::abs(g));
  const double floor = std::max(options.relative_floor * scale, 1e-300);

  std::size_t stride = 1;
  if (options.max_coordinates > 0 && base.size() > options.max_coordinates) {
    stride = (base.size() + options.max_coordinates - 1) / options.max_coordinates;
  }

  FdReport report;
  report.tolerance = options.tolerance;
  report.step = options.step;
  NetParams probe = params;
  std::vector<double> flat = base;
  for (std::size_t k = 0; k < base.size(); k += stride) {
    flat[k] = base[k] + options.step;
    probe.assign(flat);
    const double up = loss(probe);
    flat[k] = base[k] - options.step;
    probe.assign(flat);
    const double down = loss(probe);
    flat[k] = base[k];

    const double numeric = (up - down) / (2.0 * options.step);
    const double denom = std::max({std::abs(numeric), std::abs(grad[k]), floor});
    const double rel = std::abs(numeric - grad[k]) / denom;
    ++report.checked;
    if (rel > report.max_rel_error || report.checked == 1) {
      report.max_rel_error = rel;
      report.worst_index = k;
    }
    if (!(rel <= options.tolerance)) report.failing.push_back(k);
  }
  return report;
}

FdReport fd_check(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
                  const CollocationSet& batch, const Objective& objective,
                  const FdOptions& options) {
  Gradients analytic;
  evaluate_objective(spec, params, c, batch, objective, &analytic);
  auto loss = [&](const NetParams& p) { return evaluate_objective(spec, p, c, batch, objective).total; };
  return fd_check(params, loss, analytic, options);
}

}  // namespace tpinn
