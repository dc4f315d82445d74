#include "tpinn/config.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "config_json.h"
#include "tpinn/errors.h"

namespace tpinn {

using nlohmann::json;

namespace detail {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

json fluid_to_json(const FluidSpec& f) {
  return {{"density", f.density},
          {"kinematic_viscosity", f.kinematic_viscosity},
          {"bulk_modulus", f.bulk_modulus}};
}

json pipe_to_json(const PipelineSpec& p) {
  return {{"length", p.length},
          {"diameter", p.diameter},
          {"wall_thickness", p.wall_thickness},
          {"elasticity", std::isinf(p.elasticity) ? json("rigid") : json(p.elasticity)},
          {"constraint_coeff", p.constraint_coeff},
          {"friction_factor", p.friction_factor},
          {"gravity", p.gravity}};
}

FluidSpec fluid_from_json(const json& j) {
  check_keys(j, {"density", "kinematic_viscosity", "bulk_modulus"}, "fluid");
  FluidSpec f;
  f.density = j.value("density", f.density);
  f.kinematic_viscosity = j.value("kinematic_viscosity", f.kinematic_viscosity);
  f.bulk_modulus = j.value("bulk_modulus", f.bulk_modulus);
  f.validate();
  return f;
}

PipelineSpec pipe_from_json(const json& j, bool* friction_auto) {
  check_keys(j,
             {"length", "diameter", "wall_thickness", "elasticity", "constraint_coeff",
              "friction_factor", "gravity"},
             "pipe");
  PipelineSpec p;
  p.length = j.value("length", p.length);
  p.diameter = j.value("diameter", p.diameter);
  p.wall_thickness = j.value("wall_thickness", p.wall_thickness);
  if (j.contains("elasticity")) {
    const json& e = j["elasticity"];
    if (e.is_string()) {
      if (e.get<std::string>() != "rigid") throw ConfigError("pipe.elasticity: number or \"rigid\"");
      p.elasticity = std::numeric_limits<double>::infinity();
    } else {
      p.elasticity = e.get<double>();
    }
  }
  p.constraint_coeff = j.value("constraint_coeff", p.constraint_coeff);
  p.gravity = j.value("gravity", p.gravity);
  if (friction_auto) *friction_auto = false;
  if (j.contains("friction_factor")) {
    const json& f = j["friction_factor"];
    if (f.is_string()) {
      if (f.get<std::string>() != "auto" || !friction_auto) {
        throw ConfigError("pipe.friction_factor: expected a number"
                          + std::string(friction_auto ? " or \"auto\"" : ""));
      }
      *friction_auto = true;
    } else {
      p.friction_factor = f.get<double>();
    }
  }
  p.validate();
  return p;
}

json signal_to_json(const Signal& s, double scale) {
  json out = json::array();
  for (const auto& [t, v] : s.breakpoints()) out.push_back({t, v * scale});
  return out;
}

Signal signal_from_json(const json& j, double scale) {
  if (j.is_number()) return Signal::constant(j.get<double>() * scale);
  if (!j.is_array() || j.empty()) {
    throw ConfigError("signal must be a number or a non-empty list of [t, value] pairs");
  }
  std::vector<std::pair<double, double>> pts;
  for (const json& p : j) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("signal breakpoint must be [t, value]");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>() * scale);
  }
  try {
    return Signal(std::move(pts));
  } catch (const Error& e) {
    throw ConfigError(std::string("signal: ") + e.what());
  }
}

}  // namespace detail

namespace {

double flow_scale(const std::string& unit) {
  if (unit == "m3/h") return 1.0 / kSecondsPerHour;
  if (unit == "m3/s") return 1.0;
  throw ConfigError("flowrate_unit must be \"m3/h\" or \"m3/s\", got \"" + unit + "\"");
}

template <class F>
auto wrap(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

GenerateConfig parse_generate_config(const std::string& text) {
  return wrap([&] {
    const json j = json::parse(text);
    detail::check_keys(j, {"fluid", "pipe", "scenario", "moc", "dataset"}, "generate config");
    GenerateConfig g;
    Scenario& s = g.scenario;
    s.fluid = detail::fluid_from_json(j.value("fluid", json::object()));
    bool friction_auto = false;
    s.pipe = detail::pipe_from_json(j.value("pipe", json::object()), &friction_auto);

    const json sc = j.at("scenario");
    detail::check_keys(sc, {"duration", "inlet_pressure", "outlet_flowrate", "flowrate_unit", "offtake"},
                       "scenario");
    const double qs = flow_scale(sc.value("flowrate_unit", std::string("m3/h")));
    s.duration = sc.value("duration", s.duration);
    s.inlet_pressure = detail::signal_from_json(sc.at("inlet_pressure"));
    s.outlet_flowrate = detail::signal_from_json(sc.at("outlet_flowrate"), qs);
    if (sc.contains("offtake") && !sc["offtake"].is_null()) {
      const json& o = sc["offtake"];
      detail::check_keys(o, {"position", "flowrate"}, "scenario.offtake");
      s.offtake = Offtake{o.at("position").get<double>(),
                          detail::signal_from_json(o.value("flowrate", json(0.0)), qs)};
    }
    if (friction_auto) {
      double q0 = s.outlet_flowrate.left_limit(0.0);
      if (s.offtake) q0 += s.offtake->flowrate.left_limit(0.0);
      s.pipe.friction_factor =
          friction_factor(s.fluid, flowrate_to_velocity(q0, s.pipe.diameter), s.pipe.diameter);
    }

    if (j.contains("moc")) {
      detail::check_keys(j["moc"], {"dt"}, "moc");
      g.moc_dt = j["moc"].value("dt", g.moc_dt);
    }
    if (j.contains("dataset")) {
      detail::check_keys(j["dataset"], {"dx", "dt"}, "dataset");
      g.dataset_dx = j["dataset"].value("dx", g.dataset_dx);
      g.dataset_dt = j["dataset"].value("dt", g.dataset_dt);
    }
    if (!(g.moc_dt > 0.0) || !(g.dataset_dx > 0.0) || !(g.dataset_dt > 0.0)) {
      throw ConfigError("moc.dt, dataset.dx and dataset.dt must be positive");
    }
    s.validate();
    return g;
  });
}

GenerateConfig load_generate_config(const std::filesystem::path& path) {
  return parse_generate_config(read_text_file(path));
}

std::string dump_generate_config(const GenerateConfig& g) {
  const Scenario& s = g.scenario;
  const double to_h = kSecondsPerHour;
  json sc = {{"duration", s.duration},
             {"flowrate_unit", "m3/h"},
             {"inlet_pressure", detail::signal_to_json(s.inlet_pressure)},
             {"outlet_flowrate", detail::signal_to_json(s.outlet_flowrate, to_h)}};
  if (s.offtake) {
    sc["offtake"] = {{"position", s.offtake->position},
                     {"flowrate", detail::signal_to_json(s.offtake->flowrate, to_h)}};
  }
  json j = {{"fluid", detail::fluid_to_json(s.fluid)},
            {"pipe", detail::pipe_to_json(s.pipe)},
            {"scenario", sc},
            {"moc", {{"dt", g.moc_dt}}},
            {"dataset", {{"dx", g.dataset_dx}, {"dt", g.dataset_dt}}}};
  return j.dump(2) + "\n";
}

TrainConfig parse_train_config(const std::string& text) {
  return wrap([&] {
    const json j = json::parse(text);
    detail::check_keys(j,
                       {"baseline", "iterations", "batch_size", "learning_rate", "lr_decay",
                        "lr_decay_every", "adam", "seed", "weights", "bc_loss_form", "network",
                        "retention_factor", "divergence_threshold", "eval_every"},
                       "train config");
    TrainConfig c;
    if (j.contains("baseline")) c.baseline = parse_baseline(j["baseline"].get<std::string>());
    if (j.contains("iterations")) {
      const json& it = j["iterations"];
      if (it.is_number()) {
        // A single number is the total; split like the default schedule.
        const long total = it.get<long>();
        c.iterations = {total / 10, total / 10, total - 2 * (total / 10)};
      } else {
        if (!it.is_array() || it.size() != 3) throw ConfigError("iterations: number or list of 3");
        for (std::size_t k = 0; k < 3; ++k) c.iterations[k] = it[k].get<long>();
      }
    }
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.lr_decay = j.value("lr_decay", c.lr_decay);
    c.lr_decay_every = j.value("lr_decay_every", c.lr_decay_every);
    if (j.contains("adam")) {
      const json& a = j["adam"];
      detail::check_keys(a, {"beta1", "beta2", "epsilon"}, "adam");
      c.adam.beta1 = a.value("beta1", c.adam.beta1);
      c.adam.beta2 = a.value("beta2", c.adam.beta2);
      c.adam.epsilon = a.value("epsilon", c.adam.epsilon);
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("weights")) {
      const json& w = j["weights"];
      detail::check_keys(w, {"bc", "ic", "con", "mo"}, "weights");
      c.weights.bc = w.value("bc", c.weights.bc);
      c.weights.ic = w.value("ic", c.weights.ic);
      c.weights.con = w.value("con", c.weights.con);
      c.weights.mo = w.value("mo", c.weights.mo);
    }
    if (j.contains("bc_loss_form")) {
      c.bc_loss_form = parse_bc_loss_form(j["bc_loss_form"].get<std::string>());
    }
    if (j.contains("network")) {
      const json& n = j["network"];
      detail::check_keys(n, {"hidden_layers", "width", "activation"}, "network");
      c.hidden_layers = n.value("hidden_layers", c.hidden_layers);
      c.width = n.value("width", c.width);
      if (n.contains("activation")) c.activation = parse_activation(n["activation"].get<std::string>());
    }
    c.retention_factor = j.value("retention_factor", c.retention_factor);
    c.divergence_threshold = j.value("divergence_threshold", c.divergence_threshold);
    c.eval_every = j.value("eval_every", c.eval_every);
    c.validate();
    return c;
  });
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  return parse_train_config(read_text_file(path));
}

std::string dump_train_config(const TrainConfig& c) {
  json j = {{"baseline", to_string(c.baseline)},
            {"iterations", c.iterations},
            {"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"lr_decay", c.lr_decay},
            {"lr_decay_every", c.lr_decay_every},
            {"adam", {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"epsilon", c.adam.epsilon}}},
            {"seed", c.seed},
            {"weights", {{"bc", c.weights.bc}, {"ic", c.weights.ic}, {"con", c.weights.con}, {"mo", c.weights.mo}}},
            {"bc_loss_form", to_string(c.bc_loss_form)},
            {"network",
             {{"hidden_layers", c.hidden_layers}, {"width", c.width}, {"activation", to_string(c.activation)}}},
            {"retention_factor", c.retention_factor},
            {"divergence_threshold", c.divergence_threshold},
            {"eval_every", c.eval_every}};
  return j.dump(2) + "\n";
}

}  // namespace tpinn
