#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tpinn/field_grid.h"
#include "tpinn/hydro.h"
#include "tpinn/signal.h"

namespace tpinn {

// Intermediate delivery point: flow leaves the line at `position` with a
// common head on both sides.
struct Offtake {
  double position = 0.0;  // m
  Signal flowrate;        // m³/s
};

struct Scenario {
  PipelineSpec pipe;
  FluidSpec fluid;
  double duration = 600.0;  // s
  Signal inlet_pressure;    // MPa
  Signal outlet_flowrate;   // m³/s
  std::optional<Offtake> offtake;

  void validate() const;
};

// Courant-1 characteristic grid. `wave_speed` is the speed the scheme runs
// with; it may differ from `nominal_wave_speed` by at most 1% so that the
// pipe is a whole number of reaches.
struct MocGrid {
  double dt = 0.0;  // s
  double dx = 0.0;  // m
  std::size_t node_count = 0;
  double wave_speed = 0.0;          // m/s, exactly dx / dt
  double nominal_wave_speed = 0.0;  // m/s, from the wave-speed formula

  double position(std::size_t i) const { return dx * static_cast<double>(i); }
};

MocGrid build_grid(const PipelineSpec& pipe, const FluidSpec& fluid, double dt);

// Head [m] and velocity [m/s] per node. At the offtake node the velocity is
// the upstream side; the downstream side is that minus q_offtake / A.
struct MocState {
  std::vector<double> head;
  std::vector<double> velocity;
};

struct MocBoundary {
  double inlet_head = 0.0;       // m
  double outlet_velocity = 0.0;  // m/s
  double offtake_flowrate = 0.0; // m³/s
};

// Everything a step needs besides the state: the grid and the constants of
// the characteristic equations.
struct MocSystem {
  MocGrid grid;
  double gravity = kStandardGravity;
  double diameter = 0.0;
  double friction_factor = 0.0;
  double area = 0.0;
  double density = 0.0;
  std::optional<std::size_t> offtake_node;

  double impedance() const { return grid.wave_speed / gravity; }  // B = a / g
};

MocSystem make_system(const Scenario& scenario, double dt);

// Signals sampled at time t, in the units the stepper uses.
MocBoundary boundary_at(const Scenario& scenario, const MocSystem& system, double t);

// Darcy steady state matching the t = 0 boundary values (piecewise linear
// across an offtake).
MocState steady_state(const Scenario& scenario, const MocSystem& system);

// One Courant-1 step along the C+ / C- characteristics with friction taken at
// the foot of each characteristic. Throws NumericalBlowup on non-finite output.
MocState moc_step(const MocSystem& system, const MocState& state, const MocBoundary& boundary,
                  long step_index = 0);

// Runs from the steady state at t = 0 to at least the scenario duration and
// returns the full field on the MOC grid.
FieldGrid run(const Scenario& scenario, double dt);

// Continues from an arbitrary initial state (used by settling checks).
FieldGrid run_from(const Scenario& scenario, const MocSystem& system, MocState initial);

}  // namespace tpinn
