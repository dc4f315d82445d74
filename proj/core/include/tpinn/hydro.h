#pragma once

#include <limits>
#include <vector>

namespace tpinn {

inline constexpr double kStandardGravity = 9.81;
// Pressures are carried in MPa throughout; this is Pa per MPa.
inline constexpr double kPaPerMPa = 1.0e6;

struct FluidSpec {
  double density = 850.0;               // kg/m³
  double kinematic_viscosity = 5.2e-6;  // m²/s
  double bulk_modulus = 1.5e9;          // Pa

  void validate() const;
};

// Geometry and wall material of a single horizontal line. The wave speed is
// derived from these and the fluid (see wave_speed), never stored.
struct PipelineSpec {
  double length = 50'000.0;       // m
  double diameter = 0.25;         // m
  double wall_thickness = 0.007;  // m
  // Pa. +infinity selects the rigid-pipe limit.
  double elasticity = 2.07e11;
  double constraint_coeff = 1.0;
  double friction_factor = 0.0221;  // Darcy–Weisbach, frozen for a run
  double gravity = kStandardGravity;

  double area() const;
  void validate() const;
};

struct SteadyProfile {
  std::vector<double> x;         // m
  std::vector<double> pressure;  // MPa
  double velocity = 0.0;         // m/s, uniform along the line
};

double wave_speed(const FluidSpec& fluid, const PipelineSpec& pipe);

double head_to_pressure(double head, double density, double gravity = kStandardGravity);
double pressure_to_head(double pressure, double density, double gravity = kStandardGravity);

double velocity_to_flowrate(double velocity, double diameter);
double flowrate_to_velocity(double flowrate, double diameter);

inline constexpr double kSecondsPerHour = 3600.0;
inline double m3s_to_m3h(double q) { return q * kSecondsPerHour; }
inline double m3h_to_m3s(double q) { return q / kSecondsPerHour; }

double reynolds_number(const FluidSpec& fluid, double velocity, double diameter);

// Laminar 64/Re below Re = 2300 (inclusive), Blasius above. v = 0 returns the
// laminar value at Re = 2300.
double friction_factor(const FluidSpec& fluid, double velocity, double diameter);

// Darcy pressure gradient dP/dx [MPa/m] for a uniform velocity.
double darcy_gradient(const FluidSpec& fluid, const PipelineSpec& pipe, double velocity);

// Uniform-velocity Darcy profile sampled at `positions` (defaults to the two
// pipe ends). Throws InfeasibleSteadyState if the outlet pressure is negative.
SteadyProfile steady_profile(const PipelineSpec& pipe, const FluidSpec& fluid,
                             double inlet_pressure, double outlet_flowrate,
                             std::vector<double> positions = {});

}  // namespace tpinn
