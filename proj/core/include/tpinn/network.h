#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tpinn/dual.h"
#include "tpinn/field_grid.h"
#include "tpinn/hydro.h"
#include "tpinn/tape.h"

namespace tpinn {

enum class Activation { Softplus, Tanh };

// What the two network outputs mean. In pressure-velocity mode the outputs are
// P [MPa] and v [m/s], which sit within an order of magnitude of each other;
// head-velocity mode emits h [m] and v [m/s].
enum class OutputMode { PressureVelocity, HeadVelocity };

std::string to_string(Activation a);
std::string to_string(OutputMode m);
Activation parse_activation(const std::string& s);
OutputMode parse_output_mode(const std::string& s);

// Min-max map of the physical inputs onto [0, 1].
struct InputScaler {
  double x_min = 0.0;
  double x_max = 1.0;
  double t_min = 0.0;
  double t_max = 1.0;

  double x(double x_phys) const { return (x_phys - x_min) / (x_max - x_min); }
  double t(double t_phys) const { return (t_phys - t_min) / (t_max - t_min); }
  double dx_scale() const { return 1.0 / (x_max - x_min); }
  double dt_scale() const { return 1.0 / (t_max - t_min); }
  void validate() const;
};

struct NetSpec {
  int hidden_layers = 10;
  int width = 50;
  Activation activation = Activation::Softplus;
  InputScaler scaler;
  OutputMode output_mode = OutputMode::PressureVelocity;

  void validate() const;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out × in
  Eigen::VectorXd bias;
};

struct NetParams {
  std::vector<DenseLayer> layers;

  std::size_t size() const;
  bool all_finite() const;
  bool same_shape(const NetParams& other) const;
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  // Element-wise this += scale * other.
  void axpy(double scale, const NetParams& other);
};

// Same layout as NetParams, holding d(loss)/d(parameter).
using Gradients = NetParams;

// All weights zero, biases zero.
NetParams zero_params(const NetSpec& spec);
// He-normal weights (variance 2 / fan_in), zero biases, from a seeded mt19937_64.
NetParams init_params(const NetSpec& spec, std::uint64_t seed);
void check_shape(const NetSpec& spec, const NetParams& params);

// Plain MLP on already-normalised inputs. Runs for double and Dual.
template <class S>
std::array<S, 2> mlp(const NetSpec& spec, const NetParams& params, const S& xn, const S& tn);

struct NetOutputs {
  double primary = 0.0;  // P [MPa] or h [m], per output_mode
  double velocity = 0.0;
};

// Network value and its exact derivatives with respect to physical x [m] and t [s].
struct OutputJet {
  Dual primary;
  Dual velocity;
};

NetOutputs net_forward(const NetSpec& spec, const NetParams& params, double x, double t);
OutputJet forward_with_input_tangents(const NetSpec& spec, const NetParams& params, double x,
                                       double t);

// Parameters recorded on a tape, one (weight, bias) pair per layer.
struct TapeParams {
  std::vector<std::pair<ad::Var, ad::Var>> layers;
};

TapeParams record_params(ad::Tape& tape, const NetParams& params);
Gradients collect_gradients(const ad::Tape& tape, const TapeParams& vars);

// Records the network on `tape` for a batch of physical points and returns
// the 2 × N output node. With `tangents`, the node carries d/dx and d/dt in
// physical units.
ad::Var forward_batch(ad::Tape& tape, const NetSpec& spec, const TapeParams& vars,
                      std::span<const double> xs, std::span<const double> ts, bool tangents);

// Network prediction on a grid converted to (P [MPa], v [m/s]).
FieldGrid predict_field(const NetSpec& spec, const NetParams& params, const FluidSpec& fluid,
                        double gravity, const std::vector<double>& xs,
                        const std::vector<double>& ts);

}  // namespace tpinn
