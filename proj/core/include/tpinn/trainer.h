#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tpinn/adam.h"
#include "tpinn/dataset_io.h"
#include "tpinn/errors.h"
#include "tpinn/losses.h"
#include "tpinn/network.h"

namespace tpinn {

// kih: three stages (boundary, initial, coupled) with pressure-velocity outputs.
// pinn: one stage on the coupled loss with head-velocity outputs.
// dnn: one stage on boundary + initial data only, head-velocity outputs.
enum class Baseline { Kih, Pinn, Dnn };

std::string to_string(Baseline b);
Baseline parse_baseline(const std::string& s);

struct TrainConfig {
  std::array<long, 3> iterations{2000, 2000, 16000};
  int batch_size = 128;
  double learning_rate = 1e-4;
  // Multiplies the rate every `lr_decay_every` iterations; 1.0 disables it.
  double lr_decay = 1.0;
  long lr_decay_every = 1000;
  AdamConfig adam;
  std::uint64_t seed = 0;
  LossWeights weights;
  BcLossForm bc_loss_form = BcLossForm::Paper;
  Baseline baseline = Baseline::Kih;

  int hidden_layers = 10;
  int width = 50;
  Activation activation = Activation::Softplus;

  // Stage two warns when the boundary loss grows by more than this factor.
  double retention_factor = 10.0;
  double divergence_threshold = 1e6;
  // Full-set objective evaluations per stage (plus start and end); the best
  // one is the stage result.
  long eval_every = 1000;

  long total_iterations() const { return iterations[0] + iterations[1] + iterations[2]; }
  void validate() const;
};

struct TrainRecord {
  int stage = 0;
  long iter = 0;
  LossTerms terms;
};

struct TrainTrace {
  std::vector<TrainRecord> records;
  std::vector<std::string> warnings;

  // CSV with header stage,iter,loss_bc,loss_ic,loss_con,loss_mo,loss_total.
  void write_csv(std::ostream& os) const;
};

struct StageSummary {
  int stage = 0;
  long iterations = 0;
  double start_objective = 0.0;  // full training set
  double final_objective = 0.0;  // full training set, at the returned parameters
  long best_iteration = 0;
  double seconds = 0.0;
};

struct TrainData {
  CollocationSet set;
  PhysicsCoeffs physics;
  InputScaler scaler;
};

// Training points and constants from a dataset. The physics uses the wave
// speed the ground truth was generated with.
TrainData make_train_data(const Dataset& dataset);

struct StageResult {
  NetParams params;
  StageSummary summary;
};

struct TrainResult {
  NetSpec spec;
  NetParams params;
  TrainTrace trace;
  std::vector<StageSummary> stages;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, TrainTrace trace)
      : Error("diverged", what), trace_(std::move(trace)) {}
  const TrainTrace& trace() const { return trace_; }

 private:
  TrainTrace trace_;
};

NetSpec make_net_spec(const TrainConfig& config, const InputScaler& scaler);

// Split-form boundary fit from `init` (pass init_params(...) for a fresh run).
StageResult train_stage_one(const TrainConfig& config, const TrainData& data, const NetSpec& spec,
                            NetParams init, TrainTrace& trace);
// Split-form initial-condition fit starting from the stage-one parameters.
StageResult train_stage_two(const TrainConfig& config, const TrainData& data, const NetSpec& spec,
                            NetParams theta1, TrainTrace& trace);
// Coupled loss with the configured weights and data form.
StageResult train_stage_three(const TrainConfig& config, const TrainData& data,
                              const NetSpec& spec, NetParams theta2, TrainTrace& trace);

// Generic single stage: Adam on `objective` with per-family minibatches.
// Returns the parameters with the lowest full-set objective among the
// checkpoints (start, every eval_every iterations, end).
StageResult run_stage(int stage_id, const Objective& objective, long iterations,
                      const TrainConfig& config, const TrainData& data, const NetSpec& spec,
                      NetParams start, TrainTrace& trace);

// Dispatches on config.baseline.
TrainResult train(const TrainConfig& config, const TrainData& data);

}  // namespace tpinn
