#include "tpinn/tape.h"

#include <sstream>

#include "tpinn/errors.h"

namespace tpinn::ad {

using Eigen::Index;
using Eigen::MatrixXd;

DualTensor::DualTensor(Index rows, Index cols, bool dual)
    : data_(MatrixXd::Zero(rows, dual ? 3 * cols : cols)), cols_(cols), components_(dual ? 3 : 1) {}

DualTensor DualTensor::uninitialized(Index rows, Index cols, bool dual) {
  DualTensor t;
  t.data_.resize(rows, dual ? 3 * cols : cols);
  t.cols_ = cols;
  t.components_ = dual ? 3 : 1;
  return t;
}

DualTensor DualTensor::plain(MatrixXd value) {
  DualTensor t;
  t.cols_ = value.cols();
  t.components_ = 1;
  t.data_ = std::move(value);
  return t;
}

DualTensor DualTensor::with_tangents(const MatrixXd& value, const MatrixXd& dx, const MatrixXd& dt) {
  if (dx.rows() != value.rows() || dx.cols() != value.cols() || dt.rows() != value.rows() ||
      dt.cols() != value.cols()) {
    throw ShapeError("tangent shapes must match the value");
  }
  DualTensor t(value.rows(), value.cols(), true);
  t.value() = value;
  t.dx() = dx;
  t.dt() = dt;
  return t;
}

const DualTensor& Var::value() const {
  if (!tape_) throw UsageError("reading an unbound tape variable");
  return tape_->value(*this);
}

double Var::scalar() const {
  const DualTensor& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ShapeError("Var::scalar on a non-scalar node");
  return v.data()(0, 0);
}

namespace {

void require_same_shape(const DualTensor& a, const DualTensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
       << b.cols();
    throw ShapeError(os.str());
  }
}

// Adds `src` into `dst` where either may lack tangents (missing ones are zero).
void accumulate(DualTensor& dst, const DualTensor& src) {
  if (dst.components() == src.components()) {
    dst.data() += src.data();
  } else {
    dst.value() += src.value();
  }
}

}  // namespace

const DualTensor& Tape::at(Var v) const {
  if (v.tape() != this) throw UsageError("variable belongs to a different tape");
  return values_[v.id()];
}

Var Tape::push(Node node, DualTensor value, MatrixXd partial) {
  if (swept_) throw UsageError("recording on a tape after backward(); call clear() first");
  nodes_.push_back(node);
  values_.push_back(std::move(value));
  partials_.push_back(std::move(partial));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(DualTensor value) { return push({Op::Constant}, std::move(value)); }

Var Tape::constant(MatrixXd value) { return push({Op::Constant}, DualTensor::plain(std::move(value))); }

Var Tape::parameter(const MatrixXd& value) {
  return push({Op::Parameter}, DualTensor::plain(value));
}

Var Tape::matmul(Var weight, Var input) {
  const DualTensor& w = at(weight);
  const DualTensor& x = at(input);
  if (w.is_dual()) throw UsageError("matmul: weight must be a plain node");
  if (w.cols() != x.rows()) throw ShapeError("matmul: inner dimensions differ");
  DualTensor out = DualTensor::uninitialized(w.rows(), x.cols(), x.is_dual());
  out.data().noalias() = w.data() * x.data();
  return push({Op::MatMul, weight.id(), input.id()}, std::move(out));
}

Var Tape::affine(Var weight, Var input, Var bias) {
  const DualTensor& w = at(weight);
  const DualTensor& x = at(input);
  const DualTensor& bv = at(bias);
  if (w.is_dual()) throw UsageError("affine: weight must be a plain node");
  if (w.cols() != x.rows()) throw ShapeError("affine: inner dimensions differ");
  if (bv.is_dual() || bv.cols() != 1 || bv.rows() != w.rows()) {
    throw ShapeError("affine: bias must be a plain column matching the rows");
  }
  DualTensor out = DualTensor::uninitialized(w.rows(), x.cols(), x.is_dual());
  out.data().noalias() = w.data() * x.data();
  out.value().colwise() += bv.data().col(0);
  Node node{Op::Affine, weight.id(), input.id()};
  node.extra = bias.id();
  return push(node, std::move(out));
}

Var Tape::add_bias(Var z, Var bias) {
  const DualTensor& zv = at(z);
  const DualTensor& bv = at(bias);
  if (bv.is_dual() || bv.cols() != 1 || bv.rows() != zv.rows()) {
    throw ShapeError("add_bias: bias must be a plain column matching the rows");
  }
  DualTensor out = zv;
  out.value().colwise() += bv.data().col(0);
  return push({Op::AddBias, z.id(), bias.id()}, std::move(out));
}

Var Tape::softplus(Var z) {
  const DualTensor& zv = at(z);
  DualTensor out(zv.rows(), zv.cols(), zv.is_dual());
  auto v = zv.value().array();
  // softplus(z) = max(z, 0) + log1p(exp(-|z|)); sigmoid shares exp(-|z|).
  // Eigen's log1p is scalar, so use log(u) + (e - (u - 1)) / u with u = 1 + e,
  // which is as accurate and vectorises.
  const Eigen::ArrayXXd e = (-v.abs()).exp();
  const Eigen::ArrayXXd u = 1.0 + e;
  out.value() = (v.max(0.0) + u.log() + (e - (u - 1.0)) / u).matrix();
  // sigmoid(z) = 1/u for z >= 0 and e/u below; written without a select.
  Eigen::ArrayXXd s = (e + v.sign().max(0.0) * (1.0 - e)) / u;
  if (zv.is_dual()) {
    out.dx() = (s * zv.dx().array()).matrix();
    out.dt() = (s * zv.dt().array()).matrix();
  }
  return push({Op::Softplus, z.id()}, std::move(out), s.matrix());
}

Var Tape::tanh(Var z) {
  const DualTensor& zv = at(z);
  DualTensor out(zv.rows(), zv.cols(), zv.is_dual());
  out.value() = zv.value().array().tanh().matrix();
  if (zv.is_dual()) {
    const Eigen::ArrayXXd d = 1.0 - out.value().array().square();
    out.dx() = (d * zv.dx().array()).matrix();
    out.dt() = (d * zv.dt().array()).matrix();
  }
  return push({Op::Tanh, z.id()}, std::move(out));
}

Var Tape::add(Var a, Var b) {
  const DualTensor& av = at(a);
  const DualTensor& bv = at(b);
  require_same_shape(av, bv, "add");
  DualTensor out = av.components() >= bv.components() ? av : bv;
  accumulate(out, av.components() >= bv.components() ? bv : av);
  return push({Op::Add, a.id(), b.id()}, std::move(out));
}

Var Tape::sub(Var a, Var b) {
  const DualTensor& av = at(a);
  const DualTensor& bv = at(b);
  require_same_shape(av, bv, "sub");
  DualTensor out(av.rows(), av.cols(), av.is_dual() || bv.is_dual());
  accumulate(out, av);
  if (out.components() == bv.components()) {
    out.data() -= bv.data();
  } else {
    out.value() -= bv.value();
  }
  return push({Op::Sub, a.id(), b.id()}, std::move(out));
}

Var Tape::mul(Var a, Var b) {
  const DualTensor& av = at(a);
  const DualTensor& bv = at(b);
  require_same_shape(av, bv, "mul");
  DualTensor out(av.rows(), av.cols(), av.is_dual() || bv.is_dual());
  out.value() = (av.value().array() * bv.value().array()).matrix();
  if (out.is_dual()) {
    for (Axis axis : {Axis::X, Axis::T}) {
      auto o = out.tangent(axis);
      if (av.is_dual()) o.array() += av.tangent(axis).array() * bv.value().array();
      if (bv.is_dual()) o.array() += av.value().array() * bv.tangent(axis).array();
    }
  }
  return push({Op::Mul, a.id(), b.id()}, std::move(out));
}

Var Tape::scale(Var a, double c) {
  DualTensor out = at(a);
  out.data() *= c;
  return push({Op::Scale, a.id(), 0, c}, std::move(out));
}

Var Tape::add_scalar(Var a, double c) {
  DualTensor out = at(a);
  out.value().array() += c;
  return push({Op::AddScalar, a.id(), 0, c}, std::move(out));
}

Var Tape::signed_square(Var a) {
  const DualTensor& av = at(a);
  DualTensor out(av.rows(), av.cols(), av.is_dual());
  auto v = av.value().array();
  out.value() = (v * v.abs()).matrix();
  if (av.is_dual()) {
    out.dx() = (2.0 * v.abs() * av.dx().array()).matrix();
    out.dt() = (2.0 * v.abs() * av.dt().array()).matrix();
  }
  return push({Op::SignedSquare, a.id()}, std::move(out));
}

Var Tape::row(Var a, Index r) {
  const DualTensor& av = at(a);
  if (r < 0 || r >= av.rows()) throw ShapeError("row: index out of range");
  DualTensor out(1, av.cols(), av.is_dual());
  out.data() = av.data().row(r);
  return push({Op::Row, a.id(), static_cast<std::uint32_t>(r)}, std::move(out));
}

Var Tape::tangent(Var a, Axis axis) {
  const DualTensor& av = at(a);
  DualTensor out(av.rows(), av.cols(), false);
  if (av.is_dual()) out.value() = av.tangent(axis);
  return push({Op::Tangent, a.id(), static_cast<std::uint32_t>(axis)}, std::move(out));
}

Var Tape::sum(Var a) {
  MatrixXd out(1, 1);
  out(0, 0) = at(a).value().sum();
  return push({Op::Sum, a.id()}, DualTensor::plain(std::move(out)));
}

Var Tape::mean_square(Var a) {
  const DualTensor& av = at(a);
  if (av.cols() == 0 || av.rows() == 0) throw DomainError("mean_square of an empty node");
  MatrixXd out(1, 1);
  out(0, 0) = av.value().squaredNorm() / static_cast<double>(av.rows() * av.cols());
  return push({Op::MeanSquare, a.id()}, DualTensor::plain(std::move(out)));
}

DualTensor& Tape::adjoint(std::uint32_t id) {
  if (!touched_[id]) {
    const DualTensor& v = values_[id];
    adjoints_[id] = DualTensor(v.rows(), v.cols(), v.is_dual());
    touched_[id] = true;
  }
  return adjoints_[id];
}

void Tape::backward(Var loss) {
  if (nodes_.empty()) throw UsageError("backward() called on an empty tape");
  if (swept_) throw UsageError("backward() already ran on this tape");
  const DualTensor& lv = at(loss);
  if (lv.is_dual() || lv.rows() != 1 || lv.cols() != 1) {
    throw UsageError("backward() needs a 1x1 plain loss node");
  }
  const std::size_t n = nodes_.size();
  adjoints_.assign(n, DualTensor());
  touched_.assign(n, false);
  adjoint(loss.id()).data()(0, 0) = 1.0;

  for (std::size_t k = loss.id() + 1; k-- > 0;) {
    if (!touched_[k]) continue;
    const Node& node = nodes_[k];
    const DualTensor& g = adjoints_[k];
    switch (node.op) {
      case Op::Constant:
      case Op::Parameter:
        break;
      case Op::MatMul: {
        const DualTensor& w = values_[node.a];
        const DualTensor& x = values_[node.b];
        adjoint(node.a).data().noalias() += g.data() * x.data().transpose();
        if (nodes_[node.b].op != Op::Constant) {
          adjoint(node.b).data().noalias() += w.data().transpose() * g.data();
        }
        break;
      }
      case Op::Affine: {
        const DualTensor& w = values_[node.a];
        const DualTensor& x = values_[node.b];
        adjoint(node.a).data().noalias() += g.data() * x.data().transpose();
        if (nodes_[node.b].op != Op::Constant) {
          adjoint(node.b).data().noalias() += w.data().transpose() * g.data();
        }
        adjoint(node.extra).data() += g.value().rowwise().sum();
        break;
      }
      case Op::AddBias: {
        accumulate(adjoint(node.a), g);
        adjoint(node.b).data() += g.value().rowwise().sum();
        break;
      }
      case Op::Softplus: {
        const DualTensor& z = values_[node.a];
        const auto s = partials_[k].array();
        DualTensor& gz = adjoint(node.a);
        gz.value().array() += s * g.value().array();
        if (z.is_dual()) {
          gz.value().array() +=
              s * (1.0 - s) * (z.dx().array() * g.dx().array() + z.dt().array() * g.dt().array());
          gz.dx().array() += s * g.dx().array();
          gz.dt().array() += s * g.dt().array();
        }
        break;
      }
      case Op::Tanh: {
        const DualTensor& z = values_[node.a];
        const auto y = values_[k].value().array();
        const Eigen::ArrayXXd d = 1.0 - y.square();
        DualTensor& gz = adjoint(node.a);
        gz.value().array() += d * g.value().array();
        if (z.is_dual()) {
          gz.value().array() += -2.0 * y * d *
                                (z.dx().array() * g.dx().array() + z.dt().array() * g.dt().array());
          gz.dx().array() += d * g.dx().array();
          gz.dt().array() += d * g.dt().array();
        }
        break;
      }
      case Op::Add:
        accumulate(adjoint(node.a), g);
        accumulate(adjoint(node.b), g);
        break;
      case Op::Sub: {
        accumulate(adjoint(node.a), g);
        DualTensor& gb = adjoint(node.b);
        if (gb.components() == g.components()) {
          gb.data() -= g.data();
        } else {
          gb.value() -= g.value();
        }
        break;
      }
      case Op::Mul: {
        const DualTensor& a = values_[node.a];
        const DualTensor& b = values_[node.b];
        auto pull = [&](std::uint32_t id, const DualTensor& self, const DualTensor& other) {
          DualTensor& ga = adjoint(id);
          ga.value().array() += other.value().array() * g.value().array();
          if (g.is_dual() && other.is_dual()) {
            ga.value().array() +=
                other.dx().array() * g.dx().array() + other.dt().array() * g.dt().array();
          }
          if (self.is_dual() && g.is_dual()) {
            ga.dx().array() += other.value().array() * g.dx().array();
            ga.dt().array() += other.value().array() * g.dt().array();
          }
        };
        pull(node.a, a, b);
        pull(node.b, b, a);
        break;
      }
      case Op::Scale: {
        DualTensor& ga = adjoint(node.a);
        ga.data() += node.c * g.data();
        break;
      }
      case Op::AddScalar:
        accumulate(adjoint(node.a), g);
        break;
      case Op::SignedSquare: {
        const DualTensor& a = values_[node.a];
        const auto v = a.value().array();
        DualTensor& ga = adjoint(node.a);
        ga.value().array() += 2.0 * v.abs() * g.value().array();
        if (a.is_dual()) {
          const Eigen::ArrayXXd sign = (v > 0.0).cast<double>() - (v < 0.0).cast<double>();
          ga.value().array() += 2.0 * sign *
                                (a.dx().array() * g.dx().array() + a.dt().array() * g.dt().array());
          ga.dx().array() += 2.0 * v.abs() * g.dx().array();
          ga.dt().array() += 2.0 * v.abs() * g.dt().array();
        }
        break;
      }
      case Op::Row: {
        DualTensor& ga = adjoint(node.a);
        if (ga.components() == g.components()) {
          ga.data().row(node.b) += g.data().row(0);
        } else {
          ga.value().row(node.b) += g.value().row(0);
        }
        break;
      }
      case Op::Tangent: {
        const DualTensor& a = values_[node.a];
        if (a.is_dual()) adjoint(node.a).tangent(static_cast<Axis>(node.b)) += g.value();
        break;
      }
      case Op::Sum:
        adjoint(node.a).value().array() += g.data()(0, 0);
        break;
      case Op::MeanSquare: {
        const DualTensor& a = values_[node.a];
        const double n_el = static_cast<double>(a.rows() * a.cols());
        adjoint(node.a).value() += (2.0 * g.data()(0, 0) / n_el) * a.value();
        break;
      }
    }
  }
  swept_ = true;
}

MatrixXd Tape::gradient(Var v) const {
  if (!swept_) throw UsageError("gradient() requested before backward()");
  const DualTensor& value = at(v);
  if (!touched_[v.id()]) return MatrixXd::Zero(value.rows(), value.cols());
  return adjoints_[v.id()].value();
}

void Tape::clear() {
  nodes_.clear();
  values_.clear();
  partials_.clear();
  adjoints_.clear();
  touched_.clear();
  swept_ = false;
}

}  // namespace tpinn::ad
