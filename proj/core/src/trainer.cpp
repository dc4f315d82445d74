#include "tpinn/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace tpinn {

std::string to_string(Baseline b) {
  switch (b) {
    case Baseline::Kih: return "kih";
    case Baseline::Pinn: return "pinn";
    case Baseline::Dnn: return "dnn";
  }
  return "?";
}

Baseline parse_baseline(const std::string& s) {
  if (s == "kih") return Baseline::Kih;
  if (s == "pinn") return Baseline::Pinn;
  if (s == "dnn") return Baseline::Dnn;
  throw ConfigError("unknown baseline '" + s + "' (expected kih, pinn or dnn)");
}

void TrainConfig::validate() const {
  for (long it : iterations) {
    if (it < 0) throw ConfigError("iterations must be >= 0");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("lr_decay must lie in (0, 1]");
  if (lr_decay_every < 1 || eval_every < 1) throw ConfigError("lr_decay_every and eval_every must be >= 1");
  if (hidden_layers < 1 || width < 1) throw ConfigError("network needs >= 1 hidden layer of width >= 1");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 &&
        adam.epsilon > 0.0)) {
    throw ConfigError("adam coefficients out of range");
  }
  try {
    weights.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

void TrainTrace::write_csv(std::ostream& os) const {
  os << "stage,iter,loss_bc,loss_ic,loss_con,loss_mo,loss_total\n";
  const auto old = os.precision(17);
  for (const auto& r : records) {
    os << r.stage << ',' << r.iter << ',' << r.terms.bc << ',' << r.terms.ic << ',' << r.terms.con
       << ',' << r.terms.mo << ',' << r.terms.total << '\n';
  }
  os.precision(old);
}

TrainData make_train_data(const Dataset& dataset) {
  const FieldGrid& f = dataset.field;
  TrainData d;
  d.set = build_collocation(f, dataset.meta.offtake_position);
  d.physics = PhysicsCoeffs::from(dataset.meta.fluid, dataset.meta.pipe);
  if (dataset.meta.moc_wave_speed > 0.0) d.physics.wave_speed = dataset.meta.moc_wave_speed;
  d.scaler = {f.xs().front(), f.xs().back(), f.ts().front(), f.ts().back()};
  return d;
}

NetSpec make_net_spec(const TrainConfig& config, const InputScaler& scaler) {
  NetSpec spec;
  spec.hidden_layers = config.hidden_layers;
  spec.width = config.width;
  spec.activation = config.activation;
  spec.scaler = scaler;
  spec.output_mode = config.baseline == Baseline::Kih ? OutputMode::PressureVelocity
                                                      : OutputMode::HeadVelocity;
  spec.validate();
  return spec;
}

namespace {

// Draws indices without replacement; reshuffles once fewer than a full batch remain.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::size_t batch, std::uint64_t seed)
      : order_(n), batch_(std::min(batch, n)), rng_(seed) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    reshuffle();
  }

  std::span<const std::size_t> next() {
    if (order_.empty()) return {};
    if (cursor_ + batch_ > order_.size()) reshuffle();
    std::span<const std::size_t> out(order_.data() + cursor_, batch_);
    cursor_ += batch_;
    return out;
  }

 private:
  void reshuffle() {
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
  }

  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t cursor_ = 0;
  std::mt19937_64 rng_;
};

// Stage seeds are derived so that each stage and family has its own stream.
std::uint64_t stream_seed(std::uint64_t seed, int stage, int family) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage), static_cast<std::uint32_t>(family)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// Names the loss term whose gradient is non-finite.
std::string culprit(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
                    const CollocationSet& batch, const Objective& obj) {
  const std::pair<const char*, Objective> parts[] = {
      {"loss_bc", {obj.bc, 0, 0, 0, obj.data_form}},
      {"loss_ic", {0, obj.ic, 0, 0, obj.data_form}},
      {"loss_con", {0, 0, obj.con, 0, obj.data_form}},
      {"loss_mo", {0, 0, 0, obj.mo, obj.data_form}},
  };
  for (const auto& [name, o] : parts) {
    if (o.bc == 0 && o.ic == 0 && o.con == 0 && o.mo == 0) continue;
    Gradients g;
    const LossTerms t = evaluate_objective(spec, params, c, batch, o, &g);
    if (!std::isfinite(t.total) || !g.all_finite()) return name;
  }
  return "loss_total";
}

}  // namespace

StageResult run_stage(int stage_id, const Objective& objective, long iterations,
                      const TrainConfig& config, const TrainData& data, const NetSpec& spec,
                      NetParams start, TrainTrace& trace) {
  const auto clock_start = std::chrono::steady_clock::now();
  const CollocationSet& full = data.set;
  const auto batch = static_cast<std::size_t>(config.batch_size);
  BatchSampler bc_sampler(objective.bc != 0.0 ? full.boundary.size() : 0, batch,
                          stream_seed(config.seed, stage_id, 0));
  BatchSampler ic_sampler(objective.ic != 0.0 ? full.initial.size() : 0, batch,
                          stream_seed(config.seed, stage_id, 1));
  BatchSampler cf_sampler(objective.uses_physics() ? full.xf.size() : 0, batch,
                          stream_seed(config.seed, stage_id, 2));

  NetParams params = std::move(start);
  AdamState adam = adam_init(params);

  StageResult best;
  best.params = params;
  best.summary.stage = stage_id;
  best.summary.iterations = iterations;
  best.summary.start_objective = evaluate_terms(spec, params, data.physics, full, objective).total;
  best.summary.final_objective = best.summary.start_objective;
  best.summary.best_iteration = 0;

  CollocationSet mb;
  Gradients grads;
  for (long it = 1; it <= iterations; ++it) {
    mb.boundary.clear();
    mb.initial.clear();
    mb.xf.clear();
    mb.tf.clear();
    for (std::size_t k : bc_sampler.next()) mb.boundary.push_back(full.boundary[k]);
    for (std::size_t k : ic_sampler.next()) mb.initial.push_back(full.initial[k]);
    for (std::size_t k : cf_sampler.next()) {
      mb.xf.push_back(full.xf[k]);
      mb.tf.push_back(full.tf[k]);
    }

    const LossTerms terms = evaluate_objective(spec, params, data.physics, mb, objective, &grads);
    trace.records.push_back({stage_id, it, terms});
    if (!std::isfinite(terms.total) || terms.total > config.divergence_threshold) {
      std::ostringstream os;
      os << "stage " << stage_id << " diverged at iteration " << it << " (loss " << terms.total << ")";
      throw TrainingDiverged(os.str(), trace);
    }
    if (!grads.all_finite()) {
      throw NumericalBlowup("non-finite gradient from " +
                                culprit(spec, params, data.physics, mb, objective) + " in stage " +
                                std::to_string(stage_id),
                            it);
    }
    const double lr =
        config.learning_rate * std::pow(config.lr_decay, static_cast<double>(it / config.lr_decay_every));
    adam_step(params, grads, adam, lr, config.adam);

    if (it % config.eval_every == 0 || it == iterations) {
      const double value = evaluate_terms(spec, params, data.physics, full, objective).total;
      if (value <= best.summary.final_objective) {
        best.params = params;
        best.summary.final_objective = value;
        best.summary.best_iteration = it;
      }
    }
  }
  best.summary.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return best;
}

StageResult train_stage_one(const TrainConfig& config, const TrainData& data, const NetSpec& spec,
                            NetParams init, TrainTrace& trace) {
  return run_stage(1, {1.0, 0.0, 0.0, 0.0, BcLossForm::Split}, config.iterations[0], config, data,
                   spec, std::move(init), trace);
}

StageResult train_stage_two(const TrainConfig& config, const TrainData& data, const NetSpec& spec,
                            NetParams theta1, TrainTrace& trace) {
  const Objective bc_only{1.0, 0.0, 0.0, 0.0, BcLossForm::Split};
  const double bc_before = evaluate_terms(spec, theta1, data.physics, data.set, bc_only).bc;
  StageResult r = run_stage(2, {0.0, 1.0, 0.0, 0.0, BcLossForm::Split}, config.iterations[1], config,
                            data, spec, std::move(theta1), trace);
  const double bc_after = evaluate_terms(spec, r.params, data.physics, data.set, bc_only).bc;
  if (bc_after > config.retention_factor * bc_before) {
    std::ostringstream os;
    os << "stage 2 raised the boundary loss from " << bc_before << " to " << bc_after << " (> "
       << config.retention_factor << "x)";
    trace.warnings.push_back(os.str());
  }
  return r;
}

StageResult train_stage_three(const TrainConfig& config, const TrainData& data,
                              const NetSpec& spec, NetParams theta2, TrainTrace& trace) {
  return run_stage(3, Objective::coupled(config.weights, config.bc_loss_form), config.iterations[2],
                   config, data, spec, std::move(theta2), trace);
}

TrainResult train(const TrainConfig& config, const TrainData& data) {
  config.validate();
  TrainResult result;
  result.spec = make_net_spec(config, data.scaler);
  NetParams params = init_params(result.spec, config.seed);
  switch (config.baseline) {
    case Baseline::Kih: {
      StageResult s1 = train_stage_one(config, data, result.spec, std::move(params), result.trace);
      result.stages.push_back(s1.summary);
      StageResult s2 = train_stage_two(config, data, result.spec, std::move(s1.params), result.trace);
      result.stages.push_back(s2.summary);
      StageResult s3 = train_stage_three(config, data, result.spec, std::move(s2.params), result.trace);
      result.stages.push_back(s3.summary);
      result.params = std::move(s3.params);
      break;
    }
    case Baseline::Pinn: {
      StageResult s = run_stage(1, Objective::coupled(config.weights, config.bc_loss_form),
                                config.total_iterations(), config, data, result.spec,
                                std::move(params), result.trace);
      result.stages.push_back(s.summary);
      result.params = std::move(s.params);
      break;
    }
    case Baseline::Dnn: {
      StageResult s = run_stage(1, {1.0, 1.0, 0.0, 0.0, BcLossForm::Split}, config.total_iterations(),
                                config, data, result.spec, std::move(params), result.trace);
      result.stages.push_back(s.summary);
      result.params = std::move(s.params);
      break;
    }
  }
  return result;
}

}  // namespace tpinn
