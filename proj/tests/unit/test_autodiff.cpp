#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tpinn/errors.h"
#include "tpinn/fd_check.h"
#include "tpinn/losses.h"
#include "tpinn/network.h"
#include "tpinn/tape.h"

using namespace tpinn;
using ad::Axis;
using ad::DualTensor;
using ad::Tape;
using ad::Var;
using Eigen::MatrixXd;

namespace {

NetSpec small_net(int layers, int width, OutputMode mode = OutputMode::PressureVelocity) {
  NetSpec s;
  s.hidden_layers = layers;
  s.width = width;
  s.scaler = {0.0, 50'000.0, 0.0, 600.0};
  s.output_mode = mode;
  return s;
}

CollocationSet random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 50'000.0), ut(0.0, 600.0), up(0.6, 1.5),
      uv(0.5, 0.9);
  CollocationSet s;
  for (std::size_t k = 0; k < n; ++k) {
    s.xf.push_back(ux(rng));
    s.tf.push_back(ut(rng));
    s.boundary.push_back({k % 2 ? 50'000.0 : 0.0, ut(rng), up(rng), uv(rng)});
    s.initial.push_back({ux(rng), 0.0, up(rng), uv(rng)});
  }
  return s;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST(Dual, ChainRule) {
  const Dual u(2.0, 1.0, 0.5), w(-3.0, 0.25, 2.0);
  const Dual p = u * w;
  EXPECT_DOUBLE_EQ(p.dx, 1.0 * -3.0 + 2.0 * 0.25);
  EXPECT_DOUBLE_EQ(p.dt, 0.5 * -3.0 + 2.0 * 2.0);
  const Dual q = u / w;
  EXPECT_NEAR(q.dx, (1.0 * -3.0 - 2.0 * 0.25) / 9.0, 1e-15);
  const Dual s = softplus(Dual(0.3, 1.0, 0.0));
  EXPECT_NEAR(s.dx, 1.0 / (1.0 + std::exp(-0.3)), 1e-15);
  EXPECT_NEAR(s.value, std::log(1.0 + std::exp(0.3)), 1e-15);
  const Dual sq = signed_square(Dual(-0.7, 1.0, 0.0));
  EXPECT_DOUBLE_EQ(sq.value, -0.49);
  EXPECT_DOUBLE_EQ(sq.dx, 1.4);
}

TEST(Dual, SoftplusIsStableAtExtremes) {
  EXPECT_EQ(softplus(800.0), 800.0);
  EXPECT_GT(softplus(-800.0), -1e-300);
  EXPECT_NEAR(softplus(-40.0), std::exp(-40.0), 1e-30);
  EXPECT_EQ(sigmoid(-800.0), 0.0);
  EXPECT_EQ(sigmoid(800.0), 1.0);
}

TEST(Tape, LinearLayerCarriesInputTangents) {
  // P = 2x + 3t with unit input tangents
  Tape tape;
  MatrixXd xt(2, 1);
  xt << 0.4, 0.7;
  const DualTensor in = DualTensor::with_tangents(xt, (MatrixXd(2, 1) << 1, 0).finished(),
                                                  (MatrixXd(2, 1) << 0, 1).finished());
  Var w = tape.parameter((MatrixXd(1, 2) << 2.0, 3.0).finished());
  Var b = tape.parameter(MatrixXd::Zero(1, 1));
  Var y = tape.affine(w, tape.constant(in), b);
  EXPECT_DOUBLE_EQ(y.value().value()(0, 0), 2.0 * 0.4 + 3.0 * 0.7);
  EXPECT_DOUBLE_EQ(y.value().dx()(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(y.value().dt()(0, 0), 3.0);
}

TEST(Tape, SumOfSquaresGradient) {
  Tape tape;
  const MatrixXd a = MatrixXd::Random(3, 4), c = MatrixXd::Random(5, 1);
  Var pa = tape.parameter(a), pc = tape.parameter(c);
  Var loss = tape.mean_square(pa) * 12.0 + tape.mean_square(pc) * 5.0;
  tape.backward(loss);
  EXPECT_LE((tape.gradient(pa) - 2.0 * a).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((tape.gradient(pc) - 2.0 * c).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Tape, ConstantLossHasZeroGradient) {
  Tape tape;
  Var p = tape.parameter(MatrixXd::Random(2, 2));
  Var loss = tape.constant(MatrixXd::Constant(1, 1, 3.0));
  tape.backward(loss);
  EXPECT_EQ(tape.gradient(p).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Tape, UsageErrors) {
  Tape empty;
  EXPECT_THROW(empty.backward(Var(&empty, 0)), UsageError);
  Tape tape;
  Var p = tape.parameter(MatrixXd::Random(2, 2));
  EXPECT_THROW(tape.gradient(p), UsageError);
  EXPECT_THROW(tape.backward(p), UsageError);  // not 1×1
  Var loss = tape.mean_square(p);
  tape.backward(loss);
  EXPECT_THROW(tape.backward(loss), UsageError);
  EXPECT_THROW(tape.parameter(MatrixXd::Zero(1, 1)), UsageError);
  tape.clear();
  EXPECT_NO_THROW(tape.parameter(MatrixXd::Zero(1, 1)));
}

// Every op's reverse rule, including the dual cross terms, against central
// differences of a freshly recorded tape.
TEST(Tape, AllOpsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  auto rnd = [&](int r, int c) {
    MatrixXd m(r, c);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = n01(rng);
    return m;
  };
  const MatrixXd w0 = rnd(4, 3), b0 = rnd(4, 1), v0 = rnd(3, 5), dx0 = rnd(3, 5), dt0 = rnd(3, 5);
  const MatrixXd m0 = rnd(4, 5);

  auto record = [&](Tape& tape, const MatrixXd& w, Var* wv) {
    Var W = tape.parameter(w);
    if (wv) *wv = W;
    Var B = tape.parameter(b0);
    Var X = tape.constant(DualTensor::with_tangents(v0, dx0, dt0));
    Var z = tape.add_bias(tape.matmul(W, X), B);
    Var z2 = tape.affine(W, X, B);
    Var s = tape.softplus(z);
    Var h = tape.tanh(z2);
    Var m = tape.constant(m0);
    Var e = s * h - 0.3 * signed_square(s) + (h + 0.5) - m * h;
    Var r0 = tape.row(e, 1);
    Var tx = tape.tangent(e, Axis::X);
    Var tt = tape.tangent(e, Axis::T);
    return tape.mean_square(tx) + 0.7 * tape.mean_square(tt) + tape.sum(r0) + tape.mean_square(e - 0.1);
  };

  Tape tape;
  Var wv;
  Var loss = record(tape, w0, &wv);
  tape.backward(loss);
  const MatrixXd g = tape.gradient(wv);

  const double h = 1e-6;
  for (Eigen::Index k = 0; k < w0.size(); ++k) {
    MatrixXd up = w0, dn = w0;
    up.data()[k] += h;
    dn.data()[k] -= h;
    Tape tu, td;
    const double fu = record(tu, up, nullptr).scalar();
    const double fd = record(td, dn, nullptr).scalar();
    EXPECT_LE(rel_err((fu - fd) / (2.0 * h), g.data()[k]), 1e-6) << "coordinate " << k;
  }
}

TEST(Network, ZeroWeightsGiveConstantOutputs) {
  const NetSpec spec = small_net(3, 8);
  NetParams p = zero_params(spec);
  p.layers.back().bias << 0.5, 0.5;
  for (double x : {0.0, 12'345.0, 50'000.0}) {
    const NetOutputs o = net_forward(spec, p, x, 300.0);
    EXPECT_EQ(o.primary, 0.5);
    EXPECT_EQ(o.velocity, 0.5);
    const OutputJet j = forward_with_input_tangents(spec, p, x, 300.0);
    EXPECT_EQ(j.primary.dx, 0.0);
    EXPECT_EQ(j.primary.dt, 0.0);
    EXPECT_EQ(j.velocity.dx, 0.0);
    EXPECT_EQ(j.velocity.dt, 0.0);
  }
}

TEST(Network, ScalerMapsDomainCornersToUnitSquare) {
  const InputScaler s{0.0, 50'000.0, 0.0, 600.0};
  EXPECT_EQ(s.x(50'000.0), 1.0);
  EXPECT_EQ(s.t(600.0), 1.0);
  EXPECT_EQ(s.x(0.0), 0.0);
  EXPECT_THROW((InputScaler{1.0, 1.0, 0.0, 1.0}.validate()), DomainError);
}

TEST(Network, InputTangentsMatchFiniteDifferences) {
  const NetSpec spec = small_net(3, 8);
  const NetParams p = init_params(spec, 5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double h = 1e-5;  // on the normalised inputs
  for (int k = 0; k < 20; ++k) {
    const double xn = u(rng), tn = u(rng);
    const double x = xn * 50'000.0, t = tn * 600.0;
    const OutputJet j = forward_with_input_tangents(spec, p, x, t);
    const auto fx = [&](double d) { return mlp(spec, p, xn + d, tn); };
    const auto ft = [&](double d) { return mlp(spec, p, xn, tn + d); };
    const auto xp = fx(h), xm = fx(-h), tp = ft(h), tm = ft(-h);
    // chain rule back to physical units
    EXPECT_LE(rel_err((xp[0] - xm[0]) / (2 * h) / 50'000.0, j.primary.dx), 1e-6);
    EXPECT_LE(rel_err((xp[1] - xm[1]) / (2 * h) / 50'000.0, j.velocity.dx), 1e-6);
    EXPECT_LE(rel_err((tp[0] - tm[0]) / (2 * h) / 600.0, j.primary.dt), 1e-6);
    EXPECT_LE(rel_err((tp[1] - tm[1]) / (2 * h) / 600.0, j.velocity.dt), 1e-6);
  }
}

TEST(Network, BatchedTapeAgreesWithPointwiseDuals) {
  for (Activation act : {Activation::Softplus, Activation::Tanh}) {
    NetSpec spec = small_net(4, 16);
    spec.activation = act;
    const NetParams p = init_params(spec, 21);
    const CollocationSet pts = random_points(40, 4);
    Tape tape;
    const TapeParams vars = record_params(tape, p);
    const DualTensor& out = forward_batch(tape, spec, vars, pts.xf, pts.tf, true).value();
    for (std::size_t k = 0; k < pts.xf.size(); ++k) {
      const OutputJet j = forward_with_input_tangents(spec, p, pts.xf[k], pts.tf[k]);
      const auto c = static_cast<Eigen::Index>(k);
      EXPECT_LE(rel_err(out.value()(0, c), j.primary.value), 1e-12);
      EXPECT_LE(rel_err(out.dx()(0, c), j.primary.dx), 1e-11);
      EXPECT_LE(rel_err(out.dt()(1, c), j.velocity.dt), 1e-11);
      EXPECT_LE(rel_err(out.dx()(1, c), j.velocity.dx), 1e-11);
    }
  }
}

TEST(Network, ParameterFlattenRoundTrip) {
  const NetSpec spec = small_net(2, 5);
  const NetParams p = init_params(spec, 1);
  NetParams q = zero_params(spec);
  q.assign(p.flatten());
  EXPECT_EQ(q.flatten(), p.flatten());
  EXPECT_EQ(p.size(), static_cast<std::size_t>(5 * 2 + 5 + 5 * 5 + 5 + 2 * 5 + 2));
  EXPECT_THROW(q.assign(std::vector<double>(3)), ShapeError);
}

TEST(GradParams, CoupledLossMatchesFiniteDifferences) {
  const NetSpec spec = small_net(3, 8);
  const NetParams p = init_params(spec, 17);
  const CollocationSet pts = random_points(8, 2);
  const PhysicsCoeffs c = PhysicsCoeffs::from(FluidSpec{}, PipelineSpec{});
  for (BcLossForm form : {BcLossForm::Paper, BcLossForm::Split}) {
    const FdReport r = fd_check(spec, p, c, pts, Objective::coupled(LossWeights{}, form),
                                {1e-6, 1e-5, 1e-6, 0});
    EXPECT_TRUE(r.passed()) << "max rel " << r.max_rel_error << " at " << r.worst_index;
    EXPECT_EQ(r.checked, p.size());
  }
}

TEST(GradParams, HeadVelocityModeMatchesFiniteDifferences) {
  const NetSpec spec = small_net(3, 8, OutputMode::HeadVelocity);
  const NetParams p = init_params(spec, 18);
  const CollocationSet pts = random_points(8, 3);
  const PhysicsCoeffs c = PhysicsCoeffs::from(FluidSpec{}, PipelineSpec{});
  const FdReport r =
      fd_check(spec, p, c, pts, Objective::coupled(LossWeights{}, BcLossForm::Paper), {1e-4, 1e-5, 1e-6, 0});
  EXPECT_TRUE(r.passed()) << "max rel " << r.max_rel_error << " at " << r.worst_index;
}

// d/dθ of ∂NN/∂x at one point: the second-order cross term residual losses need.
TEST(GradParams, ForwardOverReverseMatchesFiniteDifferences) {
  const NetSpec spec = small_net(3, 8);
  const NetParams p = init_params(spec, 23);
  const double x = 17'000.0, t = 250.0;

  Tape tape;
  const TapeParams vars = record_params(tape, p);
  const std::vector<double> xs{x}, ts{t};
  Var out = forward_batch(tape, spec, vars, xs, ts, true);
  Var dpdx = tape.tangent(tape.row(out, 0), Axis::X);
  tape.backward(tape.sum(dpdx));
  const Gradients g = collect_gradients(tape, vars);

  auto q = [&](const NetParams& pp) {
    return forward_with_input_tangents(spec, pp, x, t).primary.dx;
  };
  const FdReport r = fd_check(p, q, g, {1e-5, 1e-5, 1e-6, 0});
  EXPECT_TRUE(r.passed()) << "max rel " << r.max_rel_error << " at " << r.worst_index;
}

TEST(GradParams, LinearInTheLoss) {
  const NetSpec spec = small_net(3, 8);
  const NetParams p = init_params(spec, 29);
  const CollocationSet pts = random_points(16, 5);
  const PhysicsCoeffs c = PhysicsCoeffs::from(FluidSpec{}, PipelineSpec{});
  const Objective l1{1.0, 0.0, 1.0, 0.0, BcLossForm::Split};
  const Objective l2{0.0, 1.0, 0.0, 1.0, BcLossForm::Split};
  const double a = 0.3, b = 2.5;
  const Objective mix{a * 1.0, b * 1.0, a * 1.0, b * 1.0, BcLossForm::Split};
  Gradients g1, g2, gm;
  evaluate_objective(spec, p, c, pts, l1, &g1);
  evaluate_objective(spec, p, c, pts, l2, &g2);
  evaluate_objective(spec, p, c, pts, mix, &gm);
  const auto f1 = g1.flatten(), f2 = g2.flatten(), fm = gm.flatten();
  double scale = 0.0;
  for (double v : fm) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < fm.size(); ++k) {
    EXPECT_NEAR(fm[k], a * f1[k] + b * f2[k], 1e-13 * scale);
  }
}

TEST(GradParams, Deterministic) {
  const NetSpec spec = small_net(3, 8);
  const NetParams p = init_params(spec, 31);
  const CollocationSet pts = random_points(16, 6);
  const PhysicsCoeffs c = PhysicsCoeffs::from(FluidSpec{}, PipelineSpec{});
  const Objective o = Objective::coupled(LossWeights{}, BcLossForm::Paper);
  Gradients a, b;
  const LossTerms ta = evaluate_objective(spec, p, c, pts, o, &a);
  const LossTerms tb = evaluate_objective(spec, p, c, pts, o, &b);
  EXPECT_EQ(ta.total, tb.total);
  EXPECT_EQ(a.flatten(), b.flatten());
}

TEST(FdCheck, ExactOnLinearLoss) {
  const NetSpec spec = small_net(1, 3);
  const NetParams p = init_params(spec, 1);
  const std::vector<double> coef = [&] {
    std::vector<double> v(p.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 0.5 + 0.1 * static_cast<double>(k);
    return v;
  }();
  auto loss = [&](const NetParams& q) {
    const auto f = q.flatten();
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += coef[k] * f[k];
    return s;
  };
  NetParams g = zero_params(spec);
  g.assign(coef);
  const FdReport r = fd_check(p, loss, g);
  EXPECT_LT(r.max_rel_error, 1e-10);
  EXPECT_TRUE(r.passed());
}

TEST(FdCheck, FlagsACorruptedCoordinate) {
  const NetSpec spec = small_net(2, 4);
  const NetParams p = init_params(spec, 2);
  const CollocationSet pts = random_points(8, 7);
  const PhysicsCoeffs c = PhysicsCoeffs::from(FluidSpec{}, PipelineSpec{});
  const Objective o = Objective::coupled(LossWeights{}, BcLossForm::Split);
  Gradients g;
  evaluate_objective(spec, p, c, pts, o, &g);
  auto flat = g.flatten();
  const std::size_t bad = 7;
  ASSERT_NE(flat[bad], 0.0);
  flat[bad] *= 2.0;
  g.assign(flat);
  auto loss = [&](const NetParams& q) { return evaluate_objective(spec, q, c, pts, o).total; };
  const FdReport r = fd_check(p, loss, g, {1e-6, 1e-5, 1e-6, 0});
  ASSERT_EQ(r.failing.size(), 1u);
  EXPECT_EQ(r.failing[0], bad);
  EXPECT_EQ(r.worst_index, bad);
  EXPECT_FALSE(r.passed());
}

TEST(FdCheck, StridedSubsetAndBadStep) {
  const NetSpec spec = small_net(2, 4);
  const NetParams p = init_params(spec, 2);
  auto loss = [](const NetParams&) { return 1.0; };
  const FdReport r = fd_check(p, loss, zero_params(spec), {1e-4, 1e-5, 1e-6, 10});
  EXPECT_LE(r.checked, 10u);
  EXPECT_THROW(fd_check(p, loss, zero_params(spec), {0.0, 1e-5, 1e-6, 0}), DomainError);
}
