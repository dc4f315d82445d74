#include "tpinn/residuals.h"

namespace tpinn {

PhysicsCoeffs PhysicsCoeffs::from(const FluidSpec& fluid, const PipelineSpec& pipe) {
  PhysicsCoeffs c;
  c.density = fluid.density;
  c.gravity = pipe.gravity;
  c.wave_speed = tpinn::wave_speed(fluid, pipe);
  c.friction_factor = pipe.friction_factor;
  c.diameter = pipe.diameter;
  return c;
}

double momentum_residual(OutputMode mode, const OutputJet& jet, const PhysicsCoeffs& c) {
  const Dual& v = jet.velocity;
  if (mode == OutputMode::PressureVelocity) {
    return momentum_residual_pv(v.value, v.dx, v.dt, jet.primary.dx, c);
  }
  return momentum_residual_hv(v.value, v.dx, v.dt, jet.primary.dx, c);
}

double continuity_residual(OutputMode mode, const OutputJet& jet, const PhysicsCoeffs& c) {
  const Dual& v = jet.velocity;
  if (mode == OutputMode::PressureVelocity) {
    return continuity_residual_pv(v.value, v.dx, jet.primary.dt, jet.primary.dx, c);
  }
  return continuity_residual_hv(v.value, v.dx, jet.primary.dt, jet.primary.dx, c);
}

double residual_mo(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c, double x,
                   double t) {
  return momentum_residual(spec.output_mode, forward_with_input_tangents(spec, params, x, t), c);
}

double residual_con(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c, double x,
                    double t) {
  return continuity_residual(spec.output_mode, forward_with_input_tangents(spec, params, x, t), c);
}

}  // namespace tpinn
