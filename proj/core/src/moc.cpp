#include "tpinn/moc.h"

#include <cmath>
#include <sstream>

#include "tpinn/errors.h"

namespace tpinn {

void Scenario::validate() const {
  pipe.validate();
  fluid.validate();
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw DomainError("scenario.duration must be finite and >= 0");
  }
  if (inlet_pressure.empty() || outlet_flowrate.empty()) {
    throw DomainError("scenario needs inlet_pressure and outlet_flowrate signals");
  }
  if (offtake) {
    if (!(offtake->position > 0.0 && offtake->position < pipe.length)) {
      throw DomainError("offtake position must lie strictly inside the pipe");
    }
    if (offtake->flowrate.empty()) throw DomainError("offtake needs a flowrate signal");
  }
}

MocGrid build_grid(const PipelineSpec& pipe, const FluidSpec& fluid, double dt) {
  if (!(dt > 0.0)) throw DomainError("MOC time step must be positive");
  const double a = wave_speed(fluid, pipe);
  const double reaches = pipe.length / (a * dt);
  auto count = static_cast<std::size_t>(std::llround(reaches));

  MocGrid grid;
  grid.nominal_wave_speed = a;
  grid.dt = dt;
  if (count >= 2) {
    grid.dx = pipe.length / static_cast<double>(count);
    grid.wave_speed = grid.dx / dt;
    if (std::abs(grid.wave_speed / a - 1.0) > 0.01) {
      // Keep the wave speed and shorten the step instead.
      count = static_cast<std::size_t>(std::ceil(reaches));
      grid.dx = pipe.length / static_cast<double>(count);
      grid.dt = grid.dx / a;
      grid.wave_speed = a;
    }
  }
  grid.node_count = count + 1;
  if (grid.node_count < 3) {
    std::ostringstream os;
    os << "MOC grid with dt = " << dt << " s resolves only " << grid.node_count
       << " nodes over " << pipe.length << " m (need >= 3)";
    throw GridTooCoarse(os.str());
  }
  return grid;
}

MocSystem make_system(const Scenario& scenario, double dt) {
  scenario.validate();
  MocSystem sys;
  sys.grid = build_grid(scenario.pipe, scenario.fluid, dt);
  sys.gravity = scenario.pipe.gravity;
  sys.diameter = scenario.pipe.diameter;
  sys.friction_factor = scenario.pipe.friction_factor;
  sys.area = scenario.pipe.area();
  sys.density = scenario.fluid.density;
  if (scenario.offtake) {
    const auto node = static_cast<std::size_t>(std::llround(scenario.offtake->position / sys.grid.dx));
    if (node == 0 || node + 1 >= sys.grid.node_count) {
      throw GridTooCoarse("offtake falls on a boundary node of the MOC grid");
    }
    sys.offtake_node = node;
  }
  return sys;
}

MocBoundary boundary_at(const Scenario& scenario, const MocSystem& system, double t) {
  MocBoundary b;
  b.inlet_head = pressure_to_head(scenario.inlet_pressure(t), system.density, system.gravity);
  b.outlet_velocity = scenario.outlet_flowrate(t) / system.area;
  if (scenario.offtake) b.offtake_flowrate = scenario.offtake->flowrate(t);
  return b;
}

MocState steady_state(const Scenario& scenario, const MocSystem& system) {
  const std::size_t n = system.grid.node_count;
  const double p_in = scenario.inlet_pressure.left_limit(0.0);
  const double q_out = scenario.outlet_flowrate.left_limit(0.0);
  const double q_off = scenario.offtake ? scenario.offtake->flowrate.left_limit(0.0) : 0.0;

  const double v_down = q_out / system.area;
  const double v_up = (q_out + q_off) / system.area;
  const double slope_up = darcy_gradient(scenario.fluid, scenario.pipe, v_up);
  const double slope_down = darcy_gradient(scenario.fluid, scenario.pipe, v_down);
  const std::size_t split = system.offtake_node.value_or(n - 1);
  const double x_split = system.grid.position(split);

  MocState s;
  s.head.resize(n);
  s.velocity.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = system.grid.position(i);
    const double p = i <= split ? p_in + slope_up * x
                                : p_in + slope_up * x_split + slope_down * (x - x_split);
    s.head[i] = pressure_to_head(p, system.density, system.gravity);
    s.velocity[i] = i <= split ? v_up : v_down;
  }
  const double p_out = head_to_pressure(s.head.back(), system.density, system.gravity);
  if (p_out < 0.0) {
    std::ostringstream os;
    os << "steady outlet pressure " << p_out << " MPa is negative";
    throw InfeasibleSteadyState(os.str());
  }
  return s;
}

MocState moc_step(const MocSystem& system, const MocState& state, const MocBoundary& boundary,
                  long step_index) {
  const std::size_t n = system.grid.node_count;
  if (state.head.size() != n || state.velocity.size() != n) {
    throw ShapeError("MOC state does not match the grid");
  }
  const double B = system.impedance();
  // R·V|V| is the friction head lost over one reach.
  const double R = B * system.friction_factor * system.grid.dt / (2.0 * system.diameter);
  const std::optional<std::size_t> off = system.offtake_node;
  const double dv_off = boundary.offtake_flowrate / system.area;

  // Velocity leaving node i towards i+1 (downstream side at the offtake).
  auto v_right = [&](std::size_t i) {
    return off && i == *off ? state.velocity[i] - dv_off : state.velocity[i];
  };
  auto c_plus = [&](std::size_t i) {  // from node i-1
    const double v = v_right(i - 1);
    return state.head[i - 1] + B * v - R * v * std::abs(v);
  };
  auto c_minus = [&](std::size_t i) {  // from node i+1
    const double v = state.velocity[i + 1];
    return state.head[i + 1] - B * v + R * v * std::abs(v);
  };

  MocState next;
  next.head.resize(n);
  next.velocity.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double cp = c_plus(i);
    const double cm = c_minus(i);
    if (off && i == *off) {
      // H = Cp - B·Vu = Cm + B·(Vu - q/A)
      next.velocity[i] = (cp - cm + B * dv_off) / (2.0 * B);
      next.head[i] = cp - B * next.velocity[i];
    } else {
      next.velocity[i] = (cp - cm) / (2.0 * B);
      next.head[i] = 0.5 * (cp + cm);
    }
  }
  next.head[0] = boundary.inlet_head;
  next.velocity[0] = (boundary.inlet_head - c_minus(0)) / B;
  next.velocity[n - 1] = boundary.outlet_velocity;
  next.head[n - 1] = c_plus(n - 1) - B * boundary.outlet_velocity;

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(next.head[i]) || !std::isfinite(next.velocity[i])) {
      std::ostringstream os;
      os << "MOC state became non-finite at step " << step_index << ", node " << i;
      throw NumericalBlowup(os.str(), step_index);
    }
  }
  return next;
}

FieldGrid run_from(const Scenario& scenario, const MocSystem& system, MocState state) {
  const double dt = system.grid.dt;
  const auto steps = static_cast<long>(std::ceil(scenario.duration / dt - 1e-9));
  std::vector<double> xs(system.grid.node_count);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = system.grid.position(i);
  xs.back() = scenario.pipe.length;
  std::vector<double> ts(static_cast<std::size_t>(steps) + 1);
  for (std::size_t j = 0; j < ts.size(); ++j) ts[j] = dt * static_cast<double>(j);

  FieldGrid field(std::move(xs), std::move(ts));
  auto store = [&](std::size_t j, const MocState& s) {
    for (std::size_t i = 0; i < s.head.size(); ++i) {
      field.pressure(j, i) = head_to_pressure(s.head[i], system.density, system.gravity);
      field.velocity(j, i) = s.velocity[i];
    }
  };
  store(0, state);
  for (long k = 1; k <= steps; ++k) {
    const double t = dt * static_cast<double>(k);
    state = moc_step(system, state, boundary_at(scenario, system, t), k);
    store(static_cast<std::size_t>(k), state);
  }
  return field;
}

FieldGrid run(const Scenario& scenario, double dt) {
  const MocSystem system = make_system(scenario, dt);
  return run_from(scenario, system, steady_state(scenario, system));
}

}  // namespace tpinn
