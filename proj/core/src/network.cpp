#include "tpinn/network.h"

#include <cmath>
#include <random>
#include <sstream>

#include "tpinn/errors.h"

namespace tpinn {

std::string to_string(Activation a) { return a == Activation::Softplus ? "softplus" : "tanh"; }

std::string to_string(OutputMode m) {
  return m == OutputMode::PressureVelocity ? "pressure-velocity" : "head-velocity";
}

Activation parse_activation(const std::string& s) {
  if (s == "softplus") return Activation::Softplus;
  if (s == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation '" + s + "'");
}

OutputMode parse_output_mode(const std::string& s) {
  if (s == "pressure-velocity") return OutputMode::PressureVelocity;
  if (s == "head-velocity") return OutputMode::HeadVelocity;
  throw ConfigError("unknown output mode '" + s + "'");
}

void InputScaler::validate() const {
  if (!(x_min < x_max) || !(t_min < t_max)) {
    throw DomainError("input scaler needs min < max on both axes");
  }
}

void NetSpec::validate() const {
  if (hidden_layers < 1 || width < 1) throw DomainError("network needs >= 1 hidden layer of width >= 1");
  scaler.validate();
}

std::size_t NetParams::size() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool NetParams::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

bool NetParams::same_shape(const NetParams& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (layers[k].weight.rows() != other.layers[k].weight.rows() ||
        layers[k].weight.cols() != other.layers[k].weight.cols() ||
        layers[k].bias.size() != other.layers[k].bias.size()) {
      return false;
    }
  }
  return true;
}

std::vector<double> NetParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const auto& l : layers) {
    flat.insert(flat.end(), l.weight.data(), l.weight.data() + l.weight.size());
    flat.insert(flat.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return flat;
}

void NetParams::assign(std::span<const double> flat) {
  if (flat.size() != size()) throw ShapeError("flat parameter vector has the wrong length");
  std::size_t k = 0;
  for (auto& l : layers) {
    std::copy_n(flat.data() + k, l.weight.size(), l.weight.data());
    k += static_cast<std::size_t>(l.weight.size());
    std::copy_n(flat.data() + k, l.bias.size(), l.bias.data());
    k += static_cast<std::size_t>(l.bias.size());
  }
}

void NetParams::axpy(double scale, const NetParams& other) {
  if (!same_shape(other)) throw ShapeError("axpy on parameter sets of different shape");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    layers[k].weight += scale * other.layers[k].weight;
    layers[k].bias += scale * other.layers[k].bias;
  }
}

namespace {

std::vector<std::pair<int, int>> layer_shapes(const NetSpec& spec) {
  std::vector<std::pair<int, int>> shapes;  // (out, in)
  shapes.emplace_back(spec.width, 2);
  for (int k = 1; k < spec.hidden_layers; ++k) shapes.emplace_back(spec.width, spec.width);
  shapes.emplace_back(2, spec.width);
  return shapes;
}

}  // namespace

NetParams zero_params(const NetSpec& spec) {
  spec.validate();
  NetParams p;
  for (auto [out, in] : layer_shapes(spec)) {
    p.layers.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
  return p;
}

NetParams init_params(const NetSpec& spec, std::uint64_t seed) {
  NetParams p = zero_params(spec);
  std::mt19937_64 rng(seed);
  for (auto& l : p.layers) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(l.weight.cols())));
    for (Eigen::Index k = 0; k < l.weight.size(); ++k) l.weight.data()[k] = normal(rng);
  }
  return p;
}

void check_shape(const NetSpec& spec, const NetParams& params) {
  if (!params.same_shape(zero_params(spec))) {
    throw ShapeError("network parameters do not match the network spec");
  }
}

template <class S>
std::array<S, 2> mlp(const NetSpec& spec, const NetParams& params, const S& xn, const S& tn) {
  std::vector<S> act{xn, tn};
  std::vector<S> next;
  const std::size_t last = params.layers.size() - 1;
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    const DenseLayer& layer = params.layers[k];
    next.assign(static_cast<std::size_t>(layer.weight.rows()), S(0.0));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      S z(layer.bias[r]);
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        z += S(layer.weight(r, c)) * act[static_cast<std::size_t>(c)];
      }
      if (k != last) {
        using std::tanh;
        z = spec.activation == Activation::Softplus ? softplus(z) : tanh(z);
      }
      next[static_cast<std::size_t>(r)] = z;
    }
    act.swap(next);
  }
  return {act[0], act[1]};
}

template std::array<double, 2> mlp(const NetSpec&, const NetParams&, const double&, const double&);
template std::array<Dual, 2> mlp(const NetSpec&, const NetParams&, const Dual&, const Dual&);

NetOutputs net_forward(const NetSpec& spec, const NetParams& params, double x, double t) {
  auto out = mlp(spec, params, spec.scaler.x(x), spec.scaler.t(t));
  return {out[0], out[1]};
}

OutputJet forward_with_input_tangents(const NetSpec& spec, const NetParams& params, double x,
                                       double t) {
  const Dual xn(spec.scaler.x(x), spec.scaler.dx_scale(), 0.0);
  const Dual tn(spec.scaler.t(t), 0.0, spec.scaler.dt_scale());
  auto out = mlp(spec, params, xn, tn);
  return {out[0], out[1]};
}

TapeParams record_params(ad::Tape& tape, const NetParams& params) {
  TapeParams vars;
  vars.layers.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    vars.layers.emplace_back(tape.parameter(l.weight), tape.parameter(Eigen::MatrixXd(l.bias)));
  }
  return vars;
}

Gradients collect_gradients(const ad::Tape& tape, const TapeParams& vars) {
  Gradients g;
  g.layers.reserve(vars.layers.size());
  for (const auto& [w, b] : vars.layers) {
    g.layers.push_back({tape.gradient(w), tape.gradient(b).col(0)});
  }
  return g;
}

ad::Var forward_batch(ad::Tape& tape, const NetSpec& spec, const TapeParams& vars,
                      std::span<const double> xs, std::span<const double> ts, bool tangents) {
  if (xs.size() != ts.size()) throw ShapeError("forward_batch: xs and ts differ in length");
  const auto n = static_cast<Eigen::Index>(xs.size());
  ad::DualTensor input(2, n, tangents);
  for (Eigen::Index k = 0; k < n; ++k) {
    input.value()(0, k) = spec.scaler.x(xs[static_cast<std::size_t>(k)]);
    input.value()(1, k) = spec.scaler.t(ts[static_cast<std::size_t>(k)]);
  }
  if (tangents) {
    input.dx().row(0).setConstant(spec.scaler.dx_scale());
    input.dt().row(1).setConstant(spec.scaler.dt_scale());
  }
  ad::Var h = tape.constant(std::move(input));
  const std::size_t last = vars.layers.size() - 1;
  for (std::size_t k = 0; k < vars.layers.size(); ++k) {
    h = tape.affine(vars.layers[k].first, h, vars.layers[k].second);
    if (k != last) h = spec.activation == Activation::Softplus ? tape.softplus(h) : tape.tanh(h);
  }
  return h;
}

FieldGrid predict_field(const NetSpec& spec, const NetParams& params, const FluidSpec& fluid,
                        double gravity, const std::vector<double>& xs,
                        const std::vector<double>& ts) {
  check_shape(spec, params);
  FieldGrid out(xs, ts);
  std::vector<double> bx, bt;
  const std::size_t total = xs.size() * ts.size();
  constexpr std::size_t kChunk = 4096;
  for (std::size_t start = 0; start < total; start += kChunk) {
    const std::size_t end = std::min(total, start + kChunk);
    bx.clear();
    bt.clear();
    for (std::size_t k = start; k < end; ++k) {
      bx.push_back(xs[k % xs.size()]);
      bt.push_back(ts[k / xs.size()]);
    }
    ad::Tape tape;
    const TapeParams vars = record_params(tape, params);
    const auto& y = tape.value(forward_batch(tape, spec, vars, bx, bt, false)).value();
    for (std::size_t k = start; k < end; ++k) {
      const auto col = static_cast<Eigen::Index>(k - start);
      double p = y(0, col);
      if (spec.output_mode == OutputMode::HeadVelocity) p = head_to_pressure(p, fluid.density, gravity);
      out.pressure(k / xs.size(), k % xs.size()) = p;
      out.velocity(k / xs.size(), k % xs.size()) = y(1, col);
    }
  }
  return out;
}

}  // namespace tpinn
