#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "tpinn/errors.h"
#include "tpinn/losses.h"
#include "tpinn/moc.h"

using namespace tpinn;

namespace {

constexpr double kQ154 = 154.0 / 3600.0;

Scenario table_one() {
  Scenario s;
  s.duration = 600.0;
  s.inlet_pressure = Signal::constant(1.48);
  s.outlet_flowrate = Signal::constant(kQ154);
  return s;
}

// Wider line so that throughput changes stay above zero pressure.
Scenario ramp(double ramp_end = 120.0) {
  Scenario s;
  s.pipe.diameter = 0.3;
  s.pipe.friction_factor = 0.0231;
  s.duration = 600.0;
  s.inlet_pressure = Signal::constant(1.48);
  s.outlet_flowrate = Signal({{0.0, kQ154}, {60.0, kQ154}, {ramp_end, 185.0 / 3600.0}});
  return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST(BuildGrid, HalfSecondTimeStep) {
  const MocGrid g = build_grid(PipelineSpec{}, FluidSpec{}, 0.5);
  // L / (aΔt) = 50000 / (1184.017·0.5) = 84.46 reaches
  EXPECT_NEAR(g.nominal_wave_speed, 1184.017, 1e-3);
  EXPECT_EQ(g.node_count, 85u);
  EXPECT_NEAR(g.dx, 50'000.0 / 84.0, 1e-9);
  EXPECT_DOUBLE_EQ(g.wave_speed * g.dt, g.dx);
  EXPECT_LE(std::abs(g.wave_speed / g.nominal_wave_speed - 1.0), 0.01);
  EXPECT_NEAR(g.dx, 592.0, 5.0);
}

TEST(BuildGrid, ExactFitNeedsNoAdjustment) {
  PipelineSpec p;
  p.elasticity = std::numeric_limits<double>::infinity();
  FluidSpec f;
  f.bulk_modulus = 1000.0 * 1000.0 * f.density;  // a = 1000 m/s
  p.length = 1000.0 * 0.5 * 10.0;
  const MocGrid g = build_grid(p, f, 0.5);
  EXPECT_EQ(g.node_count, 11u);
  EXPECT_DOUBLE_EQ(g.wave_speed, 1000.0);
  EXPECT_DOUBLE_EQ(g.dt, 0.5);
}

TEST(BuildGrid, FallsBackToShorterStepBeyondOnePercent) {
  PipelineSpec p;
  p.elasticity = std::numeric_limits<double>::infinity();
  FluidSpec f;
  f.bulk_modulus = 1000.0 * 1000.0 * f.density;
  p.length = 1000.0 * 0.5 * 3.4;  // 3.4 reaches: rounding to 3 would need 13%
  const MocGrid g = build_grid(p, f, 0.5);
  EXPECT_EQ(g.node_count, 5u);
  EXPECT_DOUBLE_EQ(g.wave_speed, 1000.0);
  EXPECT_LT(g.dt, 0.5);
  EXPECT_NEAR(g.dx, g.wave_speed * g.dt, 1e-9);
}

TEST(BuildGrid, TooCoarse) {
  EXPECT_THROW(build_grid(PipelineSpec{}, FluidSpec{}, 30.0), GridTooCoarse);
  EXPECT_THROW(build_grid(PipelineSpec{}, FluidSpec{}, 0.0), DomainError);
}

TEST(MocStep, SteadyStateIsAFixedPoint) {
  const Scenario s = table_one();
  const MocSystem sys = make_system(s, 0.5);
  MocState st = steady_state(s, sys);
  const MocState start = st;
  for (long k = 1; k <= 1200; ++k) {
    MocState next = moc_step(sys, st, boundary_at(s, sys, 0.5 * k), k);
    EXPECT_LE(max_abs_diff(next.head, st.head), 1e-9);
    st = std::move(next);
  }
  // 1e-6 MPa is about 1.2e-4 m of head
  EXPECT_LE(max_abs_diff(st.head, start.head), 1e-6 / (850.0 * 9.81 / 1e6));
  EXPECT_LE(max_abs_diff(st.velocity, start.velocity), 1e-8);
}

TEST(Run, ZeroDurationIsSteadyProfile) {
  Scenario s = table_one();
  s.duration = 0.0;
  const FieldGrid f = run(s, 0.5);
  ASSERT_EQ(f.nt(), 1u);
  const SteadyProfile sp = steady_profile(s.pipe, s.fluid, 1.48, kQ154, f.xs());
  for (std::size_t i = 0; i < f.nx(); ++i) {
    EXPECT_NEAR(f.pressure(0, i), sp.pressure[i], 1e-12);
    EXPECT_NEAR(f.velocity(0, i), sp.velocity, 1e-15);
  }
}

TEST(Run, ConstantBoundariesStaySteady) {
  const FieldGrid f = run(table_one(), 0.5);
  double dp = 0.0, dv = 0.0;
  for (std::size_t j = 0; j < f.nt(); ++j) {
    for (std::size_t i = 0; i < f.nx(); ++i) {
      dp = std::max(dp, std::abs(f.pressure(j, i) - f.pressure(0, i)));
      dv = std::max(dv, std::abs(f.velocity(j, i) - f.velocity(0, i)));
    }
  }
  EXPECT_LE(dp, 1e-6);
  EXPECT_LE(dv, 1e-8);
}

TEST(Run, Deterministic) {
  const FieldGrid a = run(ramp(), 0.5);
  const FieldGrid b = run(ramp(), 0.5);
  EXPECT_EQ(a.pressure_data(), b.pressure_data());
  EXPECT_EQ(a.velocity_data(), b.velocity_data());
}

TEST(MocStep, JoukowskySurgeOnInstantClosure) {
  Scenario s = table_one();
  s.pipe.friction_factor = 0.0;
  s.duration = 5.0;
  s.outlet_flowrate = Signal({{0.0, kQ154}, {0.0, 0.0}});
  const MocSystem sys = make_system(s, 0.1);
  MocState st = steady_state(s, sys);
  const double v0 = kQ154 / s.pipe.area();
  const MocState next = moc_step(sys, st, boundary_at(s, sys, sys.grid.dt), 1);
  const double dh = next.head.back() - st.head.back();
  const double a = sys.grid.wave_speed;
  EXPECT_NEAR(dh, a * v0 / 9.81, 1e-9);
  // Δp = ρ a Δv with the formula wave speed: 850·1184.017·0.87146 Pa
  const double dp = dh * 850.0 * 9.81 / 1e6;
  EXPECT_NEAR(dp / 0.8770517, 1.0, 0.02);
}

TEST(MocStep, ReversedFlowMirrorsTheSolution) {
  // Symmetric line, equal pressures at both ends plus an outflow: reversing
  // the pipe orientation negates the velocity field.
  Scenario s;
  s.duration = 100.0;
  s.inlet_pressure = Signal::constant(1.0);
  s.outlet_flowrate = Signal({{0.0, 0.0}, {10.0, 0.02}});
  Scenario r = s;
  r.outlet_flowrate = s.outlet_flowrate.scaled(-1.0);
  const FieldGrid a = run(s, 0.5);
  const FieldGrid b = run(r, 0.5);
  for (std::size_t k = 0; k < a.velocity_data().size(); ++k) {
    EXPECT_NEAR(a.velocity_data()[k], -b.velocity_data()[k], 1e-12);
    // head deviation from the datum flips sign too
    EXPECT_NEAR(a.pressure_data()[k] - 1.0, -(b.pressure_data()[k] - 1.0), 1e-12);
  }
}

TEST(MocStep, NonFiniteStateIsReported) {
  const Scenario s = table_one();
  const MocSystem sys = make_system(s, 0.5);
  MocState st = steady_state(s, sys);
  st.head[3] = std::numeric_limits<double>::quiet_NaN();
  try {
    moc_step(sys, st, boundary_at(s, sys, 0.5), 42);
    FAIL() << "expected NumericalBlowup";
  } catch (const NumericalBlowup& e) {
    EXPECT_EQ(e.step(), 42);
  }
}

TEST(Run, RampReachesInletAfterOneTransit) {
  const Scenario s = ramp();
  const FieldGrid f = run(s, 0.1);
  const double transit = s.pipe.length / wave_speed(s.fluid, s.pipe);
  EXPECT_NEAR(50'000.0 / 1184.017, 42.23, 0.01);  // default pipe transit time

  // The outlet flow starts changing at 60 s; the inlet velocity must not move
  // before 60 s + L/a and must rise (more throughput) after it.
  const std::size_t inlet = 0;
  const double v0 = f.velocity(0, inlet);
  for (std::size_t j = 0; j < f.nt(); ++j) {
    const double t = f.ts()[j];
    if (t < 60.0 + transit - 0.5) {
      EXPECT_NEAR(f.velocity(j, inlet), v0, 1e-12) << t;
    }
  }
  const auto j_after = static_cast<std::size_t>((60.0 + transit + 5.0) / 0.1);
  EXPECT_GT(f.velocity(j_after, inlet), v0 + 1e-4);
}

TEST(Run, RampSettlesToNewDarcyProfile) {
  Scenario s = ramp();
  s.duration = 4000.0;
  const FieldGrid f = run(s, 0.5);
  const double q1 = 185.0 / 3600.0;
  const SteadyProfile sp = steady_profile(s.pipe, s.fluid, 1.48, q1, f.xs());
  const double drop = sp.pressure.front() - sp.pressure.back();
  double dev = 0.0;
  for (std::size_t i = 0; i < f.nx(); ++i) {
    dev = std::max(dev, std::abs(f.pressure(f.nt() - 1, i) - sp.pressure[i]));
  }
  EXPECT_LE(dev, 1e-3 * drop);
}

TEST(Run, HalvingTheStepChangesLittle) {
  const Scenario s = ramp();
  const auto xs = uniform_axis(s.pipe.length, 1000.0);
  const auto ts = uniform_axis(s.duration, 0.5);
  const FieldGrid coarse = sample(run(s, 0.2), xs, ts);
  const FieldGrid fine = sample(run(s, 0.1), xs, ts);
  double se = 0.0, sp = 0.0;
  for (std::size_t k = 0; k < coarse.pressure_data().size(); ++k) {
    const double d = coarse.pressure_data()[k] - fine.pressure_data()[k];
    se += d * d;
    sp += fine.pressure_data()[k] * fine.pressure_data()[k];
  }
  EXPECT_LT(std::sqrt(se / sp), 0.005);
}

TEST(Offtake, SplitsFlowWithCommonHead) {
  Scenario s = ramp();
  s.offtake = Offtake{25'000.0, Signal::constant(30.0 / 3600.0)};
  const MocSystem sys = make_system(s, 0.1);
  ASSERT_TRUE(sys.offtake_node.has_value());
  const MocState st = steady_state(s, sys);
  const double v_out = kQ154 / s.pipe.area();
  const double v_in = (kQ154 + 30.0 / 3600.0) / s.pipe.area();
  EXPECT_NEAR(st.velocity.front(), v_in, 1e-12);
  EXPECT_NEAR(st.velocity.back(), v_out, 1e-12);
  // Steady state with the offtake is still a fixed point.
  const MocState next = moc_step(sys, st, boundary_at(s, sys, sys.grid.dt), 1);
  EXPECT_LE(max_abs_diff(next.head, st.head), 1e-9);
  EXPECT_LE(max_abs_diff(next.velocity, st.velocity), 1e-12);
}

TEST(Offtake, KmGridLeaves48InteriorColumns) {
  Scenario s = ramp();
  s.offtake = Offtake{25'000.0, Signal::constant(0.0)};
  s.duration = 10.0;
  const FieldGrid f =
      sample(run(s, 0.1), uniform_axis(s.pipe.length, 1000.0), uniform_axis(s.duration, 0.5));
  EXPECT_EQ(f.nx(), 51u);
  const auto cols = interior_columns(f, 25'000.0);
  EXPECT_EQ(cols.size(), 48u);
  EXPECT_EQ(std::count(cols.begin(), cols.end(), 25u), 0);
  EXPECT_EQ(interior_columns(f, std::nullopt).size(), 49u);
}
