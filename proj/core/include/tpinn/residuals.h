#pragma once

#include "tpinn/dual.h"
#include "tpinn/hydro.h"
#include "tpinn/network.h"

namespace tpinn {

// Constants of the governing equations for one pipe and fluid.
struct PhysicsCoeffs {
  double density = 850.0;
  double gravity = kStandardGravity;
  double wave_speed = 1000.0;
  double friction_factor = 0.0;
  double diameter = 1.0;

  static PhysicsCoeffs from(const FluidSpec& fluid, const PipelineSpec& pipe);
  // ρg/10⁶, MPa per metre of head.
  double pressure_per_head() const { return density * gravity / kPaPerMPa; }
  // ρa²/10⁶, MPa per unit volumetric strain.
  double stiffness() const { return density * wave_speed * wave_speed / kPaPerMPa; }
};

// Momentum balance in pressure-velocity form:
//   (ρg/10⁶)·v_t + (ρg/10⁶)·v·v_x + g·P_x + f·(ρg/10⁶)·v|v|/(2D)
template <class T>
T momentum_residual_pv(const T& v, const T& v_x, const T& v_t, const T& p_x,
                       const PhysicsCoeffs& c) {
  const double k = c.pressure_per_head();
  return k * v_t + k * (v * v_x) + c.gravity * p_x +
         (c.friction_factor * k / (2.0 * c.diameter)) * signed_square(v);
}

// Continuity in pressure-velocity form: P_t + v·P_x + (ρa²/10⁶)·v_x
template <class T>
T continuity_residual_pv(const T& v, const T& v_x, const T& p_t, const T& p_x,
                         const PhysicsCoeffs& c) {
  return p_t + v * p_x + c.stiffness() * v_x;
}

// Momentum balance in head-velocity form: v_t + v·v_x + g·h_x + f·v|v|/(2D)
template <class T>
T momentum_residual_hv(const T& v, const T& v_x, const T& v_t, const T& h_x,
                       const PhysicsCoeffs& c) {
  return v_t + v * v_x + c.gravity * h_x + (c.friction_factor / (2.0 * c.diameter)) * signed_square(v);
}

// Continuity in head-velocity form: h_t + v·h_x + (a²/g)·v_x
template <class T>
T continuity_residual_hv(const T& v, const T& v_x, const T& h_t, const T& h_x,
                         const PhysicsCoeffs& c) {
  return h_t + v * h_x + (c.wave_speed * c.wave_speed / c.gravity) * v_x;
}

// Residuals from an output jet; the form follows the output mode.
double momentum_residual(OutputMode mode, const OutputJet& jet, const PhysicsCoeffs& c);
double continuity_residual(OutputMode mode, const OutputJet& jet, const PhysicsCoeffs& c);

// Pointwise residuals of a network at physical (x, t).
double residual_mo(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c, double x,
                   double t);
double residual_con(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c, double x,
                    double t);

}  // namespace tpinn
