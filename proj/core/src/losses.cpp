#include "tpinn/losses.h"

#include <algorithm>

#include "tpinn/errors.h"

namespace tpinn {

std::string to_string(BcLossForm f) { return f == BcLossForm::Paper ? "paper" : "split"; }

BcLossForm parse_bc_loss_form(const std::string& s) {
  if (s == "paper") return BcLossForm::Paper;
  if (s == "split") return BcLossForm::Split;
  throw ConfigError("unknown bc_loss_form '" + s + "' (expected paper or split)");
}

void LossWeights::validate() const {
  if (bc < 0.0 || ic < 0.0 || con < 0.0 || mo < 0.0) throw DomainError("loss weights must be >= 0");
  if (bc == 0.0 && ic == 0.0 && con == 0.0 && mo == 0.0) {
    throw DomainError("at least one loss weight must be positive");
  }
}

double mean_square(std::span<const double> residuals) {
  if (residuals.empty()) throw DomainError("mean square over an empty set");
  double acc = 0.0;
  for (double r : residuals) acc += r * r;
  return acc / static_cast<double>(residuals.size());
}

double paired_residual_loss(std::span<const double> primary_residuals,
                            std::span<const double> velocity_residuals, BcLossForm form) {
  if (primary_residuals.size() != velocity_residuals.size()) {
    throw ShapeError("paired residual spans differ in length");
  }
  if (form == BcLossForm::Split) {
    return mean_square(primary_residuals) + mean_square(velocity_residuals);
  }
  std::vector<double> avg(primary_residuals.size());
  for (std::size_t k = 0; k < avg.size(); ++k) {
    avg[k] = 0.5 * (primary_residuals[k] + velocity_residuals[k]);
  }
  return mean_square(avg);
}

namespace {

struct DataFit {
  ad::Var loss;
  double primary_mse = 0.0;
  double velocity_mse = 0.0;
};

DataFit record_data_fit(ad::Tape& tape, const NetSpec& spec, const TapeParams& vars,
                        const PhysicsCoeffs& c, const std::vector<PointSample>& samples,
                        BcLossForm form, const char* family) {
  if (samples.empty()) throw DomainError(std::string(family) + " loss over an empty sample set");
  const auto n = static_cast<Eigen::Index>(samples.size());
  std::vector<double> xs(samples.size()), ts(samples.size());
  Eigen::MatrixXd primary(1, n), velocity(1, n);
  const bool head = spec.output_mode == OutputMode::HeadVelocity;
  for (Eigen::Index k = 0; k < n; ++k) {
    const PointSample& s = samples[static_cast<std::size_t>(k)];
    xs[static_cast<std::size_t>(k)] = s.x;
    ts[static_cast<std::size_t>(k)] = s.t;
    primary(0, k) = head ? pressure_to_head(s.pressure, c.density, c.gravity) : s.pressure;
    velocity(0, k) = s.velocity;
  }
  ad::Var out = forward_batch(tape, spec, vars, xs, ts, false);
  ad::Var dp = tape.row(out, 0) - tape.constant(std::move(primary));
  ad::Var dv = tape.row(out, 1) - tape.constant(std::move(velocity));
  ad::Var mse_p = tape.mean_square(dp);
  ad::Var mse_v = tape.mean_square(dv);
  DataFit fit;
  fit.primary_mse = mse_p.scalar();
  fit.velocity_mse = mse_v.scalar();
  fit.loss = form == BcLossForm::Split ? mse_p + mse_v : tape.mean_square(0.5 * (dp + dv));
  return fit;
}

struct PhysicsFit {
  ad::Var con;
  ad::Var mo;
};

PhysicsFit record_physics(ad::Tape& tape, const NetSpec& spec, const TapeParams& vars,
                          const PhysicsCoeffs& c, std::span<const double> xf,
                          std::span<const double> tf) {
  if (xf.empty()) throw DomainError("physics loss over an empty collocation set");
  ad::Var out = forward_batch(tape, spec, vars, xf, tf, true);
  ad::Var p = tape.row(out, 0);
  ad::Var v = tape.row(out, 1);
  ad::Var p_x = tape.tangent(p, ad::Axis::X);
  ad::Var p_t = tape.tangent(p, ad::Axis::T);
  ad::Var v_x = tape.tangent(v, ad::Axis::X);
  ad::Var v_t = tape.tangent(v, ad::Axis::T);
  PhysicsFit fit;
  if (spec.output_mode == OutputMode::PressureVelocity) {
    fit.mo = tape.mean_square(momentum_residual_pv(v, v_x, v_t, p_x, c));
    fit.con = tape.mean_square(continuity_residual_pv(v, v_x, p_t, p_x, c));
  } else {
    fit.mo = tape.mean_square(momentum_residual_hv(v, v_x, v_t, p_x, c));
    fit.con = tape.mean_square(continuity_residual_hv(v, v_x, p_t, p_x, c));
  }
  return fit;
}

}  // namespace

LossTerms evaluate_objective(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
                             const CollocationSet& batch, const Objective& objective,
                             Gradients* grads) {
  check_shape(spec, params);
  ad::Tape tape;
  const TapeParams vars = record_params(tape, params);
  LossTerms terms;
  std::vector<std::pair<double, ad::Var>> parts;

  if (objective.bc != 0.0) {
    DataFit fit = record_data_fit(tape, spec, vars, c, batch.boundary, objective.data_form, "boundary");
    terms.bc = fit.loss.scalar();
    terms.bc_primary = fit.primary_mse;
    terms.bc_velocity = fit.velocity_mse;
    parts.emplace_back(objective.bc, fit.loss);
  }
  if (objective.ic != 0.0) {
    DataFit fit = record_data_fit(tape, spec, vars, c, batch.initial, objective.data_form, "initial");
    terms.ic = fit.loss.scalar();
    parts.emplace_back(objective.ic, fit.loss);
  }
  if (objective.uses_physics()) {
    PhysicsFit fit = record_physics(tape, spec, vars, c, batch.xf, batch.tf);
    terms.con = fit.con.scalar();
    terms.mo = fit.mo.scalar();
    if (objective.con != 0.0) parts.emplace_back(objective.con, fit.con);
    if (objective.mo != 0.0) parts.emplace_back(objective.mo, fit.mo);
  }

  if (parts.empty()) {
    if (grads) *grads = zero_params(spec);
    return terms;
  }
  ad::Var total = parts.front().first * parts.front().second;
  for (std::size_t k = 1; k < parts.size(); ++k) total = total + parts[k].first * parts[k].second;
  terms.total = total.scalar();
  if (grads) {
    tape.backward(total);
    *grads = collect_gradients(tape, vars);
  }
  return terms;
}

LossTerms evaluate_terms(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
                         const CollocationSet& set, const Objective& objective) {
  constexpr std::size_t kChunk = 2048;
  LossTerms acc;
  auto chunked = [&](std::size_t n, auto&& slice, double LossTerms::*field, Objective obj) {
    if (n == 0) throw DomainError("loss over an empty set");
    for (std::size_t start = 0; start < n; start += kChunk) {
      const std::size_t end = std::min(n, start + kChunk);
      const CollocationSet part = slice(start, end);
      const LossTerms t = evaluate_objective(spec, params, c, part, obj);
      const double w = static_cast<double>(end - start) / static_cast<double>(n);
      acc.*field += w * (t.*field);
      if (field == &LossTerms::bc) {
        acc.bc_primary += w * t.bc_primary;
        acc.bc_velocity += w * t.bc_velocity;
      }
      if (field == &LossTerms::con) acc.mo += w * t.mo;
    }
  };
  auto data_slice = [&](const std::vector<PointSample>& src, bool boundary) {
    return [&src, boundary](std::size_t s, std::size_t e) {
      CollocationSet part;
      auto& dst = boundary ? part.boundary : part.initial;
      dst.assign(src.begin() + static_cast<std::ptrdiff_t>(s), src.begin() + static_cast<std::ptrdiff_t>(e));
      return part;
    };
  };
  if (objective.bc != 0.0) {
    Objective o{1.0, 0.0, 0.0, 0.0, objective.data_form};
    chunked(set.boundary.size(), data_slice(set.boundary, true), &LossTerms::bc, o);
  }
  if (objective.ic != 0.0) {
    Objective o{0.0, 1.0, 0.0, 0.0, objective.data_form};
    chunked(set.initial.size(), data_slice(set.initial, false), &LossTerms::ic, o);
  }
  if (objective.uses_physics()) {
    Objective o{0.0, 0.0, 1.0, 1.0, objective.data_form};
    auto slice = [&set](std::size_t s, std::size_t e) {
      CollocationSet part;
      part.xf.assign(set.xf.begin() + static_cast<std::ptrdiff_t>(s), set.xf.begin() + static_cast<std::ptrdiff_t>(e));
      part.tf.assign(set.tf.begin() + static_cast<std::ptrdiff_t>(s), set.tf.begin() + static_cast<std::ptrdiff_t>(e));
      return part;
    };
    chunked(set.xf.size(), slice, &LossTerms::con, o);
  }
  acc.total = objective.bc * acc.bc + objective.ic * acc.ic + objective.con * acc.con +
              objective.mo * acc.mo;
  return acc;
}

double loss_mo(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
               const CollocationSet& set) {
  return evaluate_terms(spec, params, c, set, {0.0, 0.0, 0.0, 1.0}).mo;
}

double loss_con(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
                const CollocationSet& set) {
  return evaluate_terms(spec, params, c, set, {0.0, 0.0, 1.0, 0.0}).con;
}

double loss_bc(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
               const CollocationSet& set, BcLossForm form) {
  return evaluate_terms(spec, params, c, set, {1.0, 0.0, 0.0, 0.0, form}).bc;
}

double loss_ic(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
               const CollocationSet& set, BcLossForm form) {
  return evaluate_terms(spec, params, c, set, {0.0, 1.0, 0.0, 0.0, form}).ic;
}

double coupled_loss(const LossWeights& weights, const NetSpec& spec, const NetParams& params,
                    const PhysicsCoeffs& c, const CollocationSet& set, BcLossForm form) {
  weights.validate();
  return evaluate_terms(spec, params, c, set, Objective::coupled(weights, form)).total;
}

}  // namespace tpinn
