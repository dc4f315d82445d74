#include "tpinn/hydro.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tpinn/errors.h"

namespace tpinn {

namespace {

constexpr double kLaminarLimit = 2300.0;

void require_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    std::ostringstream os;
    os << name << " must be positive, got " << value;
    throw DomainError(os.str());
  }
}

}  // namespace

void FluidSpec::validate() const {
  require_positive(density, "fluid.density");
  require_positive(kinematic_viscosity, "fluid.kinematic_viscosity");
  require_positive(bulk_modulus, "fluid.bulk_modulus");
}

double PipelineSpec::area() const { return std::numbers::pi * diameter * diameter / 4.0; }

void PipelineSpec::validate() const {
  require_positive(length, "pipe.length");
  require_positive(diameter, "pipe.diameter");
  require_positive(wall_thickness, "pipe.wall_thickness");
  require_positive(elasticity, "pipe.elasticity");
  require_positive(gravity, "pipe.gravity");
  if (!(constraint_coeff > 0.0 && constraint_coeff <= 2.0)) {
    throw DomainError("pipe.constraint_coeff must lie in (0, 2]");
  }
  // f = 0 is accepted for frictionless reference runs.
  if (!(friction_factor >= 0.0 && friction_factor < 0.1)) {
    throw DomainError("pipe.friction_factor must lie in [0, 0.1)");
  }
}

double wave_speed(const FluidSpec& fluid, const PipelineSpec& pipe) {
  fluid.validate();
  require_positive(pipe.diameter, "pipe.diameter");
  require_positive(pipe.wall_thickness, "pipe.wall_thickness");
  require_positive(pipe.elasticity, "pipe.elasticity");
  if (!(pipe.constraint_coeff > 0.0 && pipe.constraint_coeff <= 2.0)) {
    throw DomainError("pipe.constraint_coeff must lie in (0, 2]");
  }
  const double elastic = std::isinf(pipe.elasticity)
                             ? 0.0
                             : (fluid.bulk_modulus / pipe.elasticity) *
                                   (pipe.diameter / pipe.wall_thickness) * pipe.constraint_coeff;
  return std::sqrt((fluid.bulk_modulus / fluid.density) / (1.0 + elastic));
}

double head_to_pressure(double head, double density, double gravity) {
  return density * gravity * head / kPaPerMPa;
}

double pressure_to_head(double pressure, double density, double gravity) {
  return pressure * kPaPerMPa / (density * gravity);
}

double velocity_to_flowrate(double velocity, double diameter) {
  require_positive(diameter, "diameter");
  return std::numbers::pi * diameter * diameter / 4.0 * velocity;
}

double flowrate_to_velocity(double flowrate, double diameter) {
  require_positive(diameter, "diameter");
  return flowrate / (std::numbers::pi * diameter * diameter / 4.0);
}

double reynolds_number(const FluidSpec& fluid, double velocity, double diameter) {
  require_positive(fluid.kinematic_viscosity, "fluid.kinematic_viscosity");
  require_positive(diameter, "diameter");
  return std::abs(velocity) * diameter / fluid.kinematic_viscosity;
}

double friction_factor(const FluidSpec& fluid, double velocity, double diameter) {
  double re = reynolds_number(fluid, velocity, diameter);
  if (re == 0.0) re = kLaminarLimit;
  if (re <= kLaminarLimit) return 64.0 / re;
  return 0.3164 * std::pow(re, -0.25);
}

double darcy_gradient(const FluidSpec& fluid, const PipelineSpec& pipe, double velocity) {
  return -pipe.friction_factor * fluid.density * velocity * std::abs(velocity) /
         (2.0 * pipe.diameter * kPaPerMPa);
}

SteadyProfile steady_profile(const PipelineSpec& pipe, const FluidSpec& fluid,
                             double inlet_pressure, double outlet_flowrate,
                             std::vector<double> positions) {
  pipe.validate();
  fluid.validate();
  SteadyProfile out;
  out.velocity = outlet_flowrate / pipe.area();
  const double slope = darcy_gradient(fluid, pipe, out.velocity);
  const double outlet = inlet_pressure + slope * pipe.length;
  if (outlet < 0.0) {
    std::ostringstream os;
    os << "steady outlet pressure " << outlet << " MPa is negative (inlet " << inlet_pressure
       << " MPa, friction drop " << -slope * pipe.length << " MPa)";
    throw InfeasibleSteadyState(os.str());
  }
  if (positions.empty()) positions = {0.0, pipe.length};
  out.x = std::move(positions);
  out.pressure.reserve(out.x.size());
  for (double x : out.x) out.pressure.push_back(inlet_pressure + slope * x);
  return out;
}

}  // namespace tpinn
