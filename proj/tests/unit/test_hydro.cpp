#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "tpinn/errors.h"
#include "tpinn/hydro.h"

using namespace tpinn;

namespace {

// Default fluid and steel line.
FluidSpec oil() { return FluidSpec{}; }
PipelineSpec line() { return PipelineSpec{}; }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(WaveSpeed, RigidLimitIsBulkSoundSpeed) {
  PipelineSpec p = line();
  p.elasticity = std::numeric_limits<double>::infinity();
  const double oracle = std::sqrt(1.5e9 / 850.0);
  EXPECT_NEAR(wave_speed(oil(), p), oracle, 1e-9);
  EXPECT_NEAR(oracle, 1328.4223, 1e-4);
}

TEST(WaveSpeed, SteelDefaults) {
  // (K/ρ) / (1 + (K/E)(D/δ)C1) by hand
  const double oracle = std::sqrt((1.5e9 / 850.0) / (1.0 + (1.5e9 / 2.07e11) * (0.25 / 0.007)));
  EXPECT_NEAR(wave_speed(oil(), line()), oracle, 1e-9);
  EXPECT_NEAR(wave_speed(oil(), line()), 1184.0170, 1e-3);
}

TEST(WaveSpeed, UnitIdentity) {
  FluidSpec f;
  f.bulk_modulus = f.density;
  PipelineSpec p = line();
  p.elasticity = std::numeric_limits<double>::infinity();
  EXPECT_DOUBLE_EQ(wave_speed(f, p), 1.0);
}

TEST(WaveSpeed, RejectsNonPositiveInputs) {
  FluidSpec f = oil();
  f.density = 0.0;
  EXPECT_THROW(wave_speed(f, line()), DomainError);
  PipelineSpec p = line();
  p.wall_thickness = -1.0;
  EXPECT_THROW(wave_speed(oil(), p), DomainError);
  p = line();
  p.constraint_coeff = 2.5;
  EXPECT_THROW(wave_speed(oil(), p), DomainError);
}

TEST(WaveSpeed, SoftensWithSlendernessAndCompliance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int k = 0; k < 200; ++k) {
    PipelineSpec p = line();
    p.diameter *= u(rng);
    const double a0 = wave_speed(oil(), p);
    PipelineSpec thinner = p;
    thinner.wall_thickness *= 0.9;
    PipelineSpec softer = p;
    softer.elasticity *= 0.9;
    EXPECT_GT(a0, 0.0);
    EXPECT_LT(wave_speed(oil(), thinner), a0);
    EXPECT_LT(wave_speed(oil(), softer), a0);
  }
}

TEST(Conversions, HeadPressure) {
  EXPECT_EQ(head_to_pressure(0.0, 850.0), 0.0);
  EXPECT_NEAR(head_to_pressure(100.0, 850.0, 9.81), 850.0 * 9.81 * 100.0 / 1e6, 1e-15);
  EXPECT_NEAR(head_to_pressure(100.0, 850.0, 9.81), 0.83385, 1e-12);
  EXPECT_LE(rel(pressure_to_head(head_to_pressure(177.3, 850.0), 850.0), 177.3), 1e-12);
  EXPECT_LT(head_to_pressure(-5.0, 850.0), 0.0);
}

TEST(Conversions, VelocityFlowrate) {
  EXPECT_EQ(velocity_to_flowrate(0.0, 0.25), 0.0);
  const double q = 154.0 / 3600.0;
  const double oracle = q / (3.14159265358979323846 * 0.25 * 0.25 / 4.0);
  EXPECT_NEAR(flowrate_to_velocity(q, 0.25), oracle, 1e-14);
  EXPECT_NEAR(flowrate_to_velocity(q, 0.25), 0.87146, 1e-5);
  EXPECT_LE(rel(flowrate_to_velocity(velocity_to_flowrate(1.5, 0.25), 0.25), 1.5), 1e-12);
  EXPECT_THROW(velocity_to_flowrate(1.0, 0.0), DomainError);
  EXPECT_THROW(flowrate_to_velocity(1.0, -0.1), DomainError);
}

TEST(Conversions, RandomRoundTrips) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> h(-500.0, 5000.0), v(-5.0, 5.0), rho(500.0, 1200.0),
      d(0.05, 1.5);
  for (int k = 0; k < 1000; ++k) {
    const double hh = h(rng), r = rho(rng), vv = v(rng), dd = d(rng);
    EXPECT_LE(std::abs(pressure_to_head(head_to_pressure(hh, r), r) - hh), 1e-12 * std::abs(hh));
    EXPECT_LE(std::abs(flowrate_to_velocity(velocity_to_flowrate(vv, dd), dd) - vv),
              1e-12 * std::abs(vv));
  }
}

TEST(Friction, BlasiusAtTableOneFlow) {
  const double v = flowrate_to_velocity(154.0 / 3600.0, 0.25);
  const double re = v * 0.25 / 5.2e-6;
  EXPECT_NEAR(reynolds_number(oil(), v, 0.25), re, 1e-9);
  EXPECT_NEAR(re, 41897.2, 0.1);
  EXPECT_NEAR(friction_factor(oil(), v, 0.25), 0.3164 * std::pow(re, -0.25), 1e-15);
  EXPECT_NEAR(friction_factor(oil(), v, 0.25), 0.022115, 1e-6);
}

TEST(Friction, LaminarBranch) {
  FluidSpec f = oil();
  // v·D/ν = 64
  EXPECT_NEAR(friction_factor(f, 64.0 * f.kinematic_viscosity / 0.25, 0.25), 1.0, 1e-12);
  // Re = 2300 takes the laminar branch.
  const double v2300 = 2300.0 * f.kinematic_viscosity / 0.25;
  EXPECT_NEAR(friction_factor(f, v2300, 0.25), 64.0 / 2300.0, 1e-12);
  EXPECT_NE(64.0 / 2300.0, 0.3164 * std::pow(2300.0, -0.25));
  // v = 0 falls back to the Re = 2300 value; sign of v does not matter.
  EXPECT_NEAR(friction_factor(f, 0.0, 0.25), 64.0 / 2300.0, 1e-15);
  EXPECT_EQ(friction_factor(f, -0.8, 0.25), friction_factor(f, 0.8, 0.25));
}

TEST(SteadyProfile, Frictionless) {
  PipelineSpec p = line();
  p.friction_factor = 0.0;
  const SteadyProfile s = steady_profile(p, oil(), 1.48, 154.0 / 3600.0);
  for (double pr : s.pressure) EXPECT_EQ(pr, 1.48);
}

TEST(SteadyProfile, TableOneDarcyDrop) {
  const double v = flowrate_to_velocity(154.0 / 3600.0, 0.25);
  const double grad = 0.0221 * 850.0 * v * v / (2.0 * 0.25 * 1e6);  // MPa/m
  EXPECT_NEAR(grad, 2.8532e-5, 1e-9);
  const SteadyProfile s = steady_profile(line(), oil(), 1.48, 154.0 / 3600.0);
  EXPECT_NEAR(s.velocity, v, 1e-15);
  EXPECT_NEAR(s.pressure.back(), 1.48 - grad * 50'000.0, 1e-12);
  EXPECT_NEAR(s.pressure.back(), 0.053382, 1e-6);
}

TEST(SteadyProfile, ZeroFlowIsFlat) {
  const SteadyProfile s = steady_profile(line(), oil(), 1.2, 0.0);
  EXPECT_EQ(s.velocity, 0.0);
  for (double pr : s.pressure) EXPECT_EQ(pr, 1.2);
}

TEST(SteadyProfile, InfeasibleWhenOutletGoesNegative) {
  EXPECT_THROW(steady_profile(line(), oil(), 1.48, 185.0 / 3600.0), InfeasibleSteadyState);
}

TEST(SteadyProfile, GradientMatchesDarcyAndDecreases) {
  std::vector<double> xs;
  for (int i = 0; i <= 50; ++i) xs.push_back(1000.0 * i);
  const SteadyProfile s = steady_profile(line(), oil(), 1.48, 154.0 / 3600.0, xs);
  const double g = darcy_gradient(oil(), line(), s.velocity);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    EXPECT_LT(s.pressure[i], s.pressure[i - 1]);
    const double slope = (s.pressure[i] - s.pressure[i - 1]) / (xs[i] - xs[i - 1]);
    EXPECT_LE(rel(slope, g), 1e-12);
  }
  EXPECT_EQ(g, -0.0221 * 850.0 * s.velocity * std::abs(s.velocity) / (2.0 * 0.25 * 1e6));
}
