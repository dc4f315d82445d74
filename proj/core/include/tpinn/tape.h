#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace tpinn::ad {

enum class Axis : std::uint8_t { X, T };

// Matrix-valued forward-mode number. `data` holds `components` blocks of
// rows × cols side by side: the primal value, then (for dual tensors) the
// tangents d/dx and d/dt. Keeping them adjacent lets a layer's three matrix
// products run as one GEMM.
class DualTensor {
 public:
  DualTensor() = default;
  DualTensor(Eigen::Index rows, Eigen::Index cols, bool dual);
  // Storage left uninitialised; the caller overwrites every entry.
  static DualTensor uninitialized(Eigen::Index rows, Eigen::Index cols, bool dual);
  static DualTensor plain(Eigen::MatrixXd value);
  static DualTensor with_tangents(const Eigen::MatrixXd& value, const Eigen::MatrixXd& dx,
                                  const Eigen::MatrixXd& dt);

  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index cols() const { return cols_; }
  bool is_dual() const { return components_ == 3; }
  int components() const { return components_; }

  auto value() { return data_.leftCols(cols_); }
  auto value() const { return data_.leftCols(cols_); }
  auto tangent(Axis axis) { return data_.middleCols(axis == Axis::X ? cols_ : 2 * cols_, cols_); }
  auto tangent(Axis axis) const {
    return data_.middleCols(axis == Axis::X ? cols_ : 2 * cols_, cols_);
  }
  auto dx() { return tangent(Axis::X); }
  auto dx() const { return tangent(Axis::X); }
  auto dt() { return tangent(Axis::T); }
  auto dt() const { return tangent(Axis::T); }

  Eigen::MatrixXd& data() { return data_; }
  const Eigen::MatrixXd& data() const { return data_; }

 private:
  Eigen::MatrixXd data_;
  Eigen::Index cols_ = 0;
  int components_ = 1;
};

class Tape;

// Handle to a node on a tape. Arithmetic on handles records new nodes.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}
  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const DualTensor& value() const;
  double scalar() const;  // 1×1 primal value

 private:
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

enum class Op : std::uint8_t {
  Constant,
  Parameter,
  MatMul,
  AddBias,
  Affine,
  Softplus,
  Tanh,
  Add,
  Sub,
  Mul,
  Scale,
  AddScalar,
  SignedSquare,
  Row,
  Tangent,
  Sum,
  MeanSquare,
};

// Reverse-mode tape over DualTensor values. Nodes are appended in evaluation
// order, so the node list is already topologically sorted and one backward
// sweep reaches every node. Because the recorded values are duals, the
// adjoints of parameters include the cross terms d²(·)/dθ d(x,t) needed by
// residual losses.
class Tape {
 public:
  Var constant(DualTensor value);
  Var constant(Eigen::MatrixXd value);
  Var parameter(const Eigen::MatrixXd& value);

  Var matmul(Var weight, Var input);  // weight must be plain
  Var add_bias(Var z, Var bias);      // bias is rows × 1, broadcast over columns
  // weight · input + bias as one node (bias only on the value block).
  Var affine(Var weight, Var input, Var bias);
  Var softplus(Var z);
  Var tanh(Var z);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var signed_square(Var a);  // a·|a|
  Var row(Var a, Eigen::Index r);
  Var tangent(Var a, Axis axis);  // plain node holding d(a)/d(axis)
  Var sum(Var a);                 // 1×1, primal only
  Var mean_square(Var a);         // 1×1, primal only

  const DualTensor& value(Var v) const { return values_.at(v.id()); }

  // Seeds d(loss)/d(loss) = 1 and sweeps every recorded node once. `loss`
  // must be a 1×1 plain node. Throws UsageError on an empty tape.
  void backward(Var loss);
  bool has_gradients() const { return swept_; }

  // Adjoint of a node's primal value; zero if the node did not influence the loss.
  Eigen::MatrixXd gradient(Var v) const;

  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double c = 0.0;
    std::uint32_t extra = 0;  // third operand (affine bias)
  };

  Var push(Node node, DualTensor value, Eigen::MatrixXd partial = {});
  const DualTensor& at(Var v) const;
  DualTensor& adjoint(std::uint32_t id);

  std::vector<Node> nodes_;
  std::vector<DualTensor> values_;
  std::vector<Eigen::MatrixXd> partials_;  // cached local derivative where useful
  std::vector<DualTensor> adjoints_;
  std::vector<bool> touched_;
  bool swept_ = false;
};

inline Var operator+(Var a, Var b) { return a.tape()->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape()->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape()->mul(a, b); }
inline Var operator*(double c, Var a) { return a.tape()->scale(a, c); }
inline Var operator*(Var a, double c) { return a.tape()->scale(a, c); }
inline Var operator+(Var a, double c) { return a.tape()->add_scalar(a, c); }
inline Var operator-(Var a, double c) { return a.tape()->add_scalar(a, -c); }
inline Var operator-(Var a) { return a.tape()->scale(a, -1.0); }
inline Var softplus(Var a) { return a.tape()->softplus(a); }
inline Var tanh(Var a) { return a.tape()->tanh(a); }
inline Var signed_square(Var a) { return a.tape()->signed_square(a); }

}  // namespace tpinn::ad
