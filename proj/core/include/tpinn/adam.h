#pragma once

#include <string_view>

#include "tpinn/network.h"

namespace tpinn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  NetParams first_moment;
  NetParams second_moment;
  long step = 0;
};

AdamState adam_init(const NetParams& params);

// Bias-corrected Adam update, in place. A non-finite gradient entry raises
// NumericalBlowup whose message names `source`.
void adam_step(NetParams& params, const Gradients& grads, AdamState& state, double learning_rate,
               const AdamConfig& config, std::string_view source = "gradient");

}  // namespace tpinn
