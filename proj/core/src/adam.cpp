#include "tpinn/adam.h"

#include <cmath>
#include <string>

#include "tpinn/errors.h"

namespace tpinn {

AdamState adam_init(const NetParams& params) {
  AdamState s;
  s.first_moment = params;
  s.second_moment = params;
  for (auto* p : {&s.first_moment, &s.second_moment}) {
    for (auto& l : p->layers) {
      l.weight.setZero();
      l.bias.setZero();
    }
  }
  return s;
}

void adam_step(NetParams& params, const Gradients& grads, AdamState& state, double learning_rate,
               const AdamConfig& config, std::string_view source) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment)) {
    throw ShapeError("adam_step: parameters, gradients and state differ in shape");
  }
  if (!grads.all_finite()) {
    throw NumericalBlowup("non-finite gradient from " + std::string(source), state.step + 1);
  }
  ++state.step;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + config.epsilon);
  };
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    update(params.layers[k].weight, grads.layers[k].weight, state.first_moment.layers[k].weight,
           state.second_moment.layers[k].weight);
    update(params.layers[k].bias, grads.layers[k].bias, state.first_moment.layers[k].bias,
           state.second_moment.layers[k].bias);
  }
}

}  // namespace tpinn
