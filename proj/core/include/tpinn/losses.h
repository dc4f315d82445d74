#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpinn/field_grid.h"
#include "tpinn/network.h"
#include "tpinn/residuals.h"

namespace tpinn {

// Observed state at one (x, t) location.
struct PointSample {
  double x = 0.0;
  double t = 0.0;
  double pressure = 0.0;  // MPa
  double velocity = 0.0;  // m/s
};

// Training points: interior collocation coordinates (no targets), boundary
// samples at x ∈ {0, L}, and initial samples at t = 0.
struct CollocationSet {
  std::vector<double> xf;
  std::vector<double> tf;
  std::vector<PointSample> boundary;
  std::vector<PointSample> initial;

  std::size_t collocation_size() const { return xf.size(); }
  // Checks boundary x ∈ {0, length}, initial t = t0 and collocation strictly inside.
  void validate(double length, double t0 = 0.0) const;
};

// How a (P, v) data misfit is folded into one number.
//   paper: mean of ((ΔP + Δv) / 2)²; residuals are averaged before squaring
//   split: mean(ΔP²) + mean(Δv²)
enum class BcLossForm { Paper, Split };

std::string to_string(BcLossForm f);
BcLossForm parse_bc_loss_form(const std::string& s);

struct LossWeights {
  double bc = 1.0;
  double ic = 1.0;
  double con = 1.0;
  double mo = 1.0;

  void validate() const;
};

// Which terms enter an objective, with what weight, and in which data form.
struct Objective {
  double bc = 0.0;
  double ic = 0.0;
  double con = 0.0;
  double mo = 0.0;
  BcLossForm data_form = BcLossForm::Split;

  static Objective coupled(const LossWeights& w, BcLossForm form) {
    return {w.bc, w.ic, w.con, w.mo, form};
  }
  bool uses_physics() const { return con != 0.0 || mo != 0.0; }
};

// Loss term values. Terms an objective does not use are left at 0. The
// primary/velocity fields split the boundary misfit into its two outputs
// (primary is P or h depending on the output mode).
struct LossTerms {
  double bc = 0.0;
  double ic = 0.0;
  double con = 0.0;
  double mo = 0.0;
  double total = 0.0;
  double bc_primary = 0.0;
  double bc_velocity = 0.0;
};

double mean_square(std::span<const double> residuals);
double paired_residual_loss(std::span<const double> primary_residuals,
                            std::span<const double> velocity_residuals, BcLossForm form);

// Evaluates `objective` on `batch`. When `grads` is non-null the parameters'
// gradient of the weighted total is written there.
LossTerms evaluate_objective(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
                             const CollocationSet& batch, const Objective& objective,
                             Gradients* grads = nullptr);

// Same values as evaluate_objective without gradients, processed in chunks so
// that large sets fit in memory.
LossTerms evaluate_terms(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
                         const CollocationSet& set, const Objective& objective);

// Single-term conveniences over a whole set.
double loss_mo(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
               const CollocationSet& set);
double loss_con(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
                const CollocationSet& set);
double loss_bc(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
               const CollocationSet& set, BcLossForm form = BcLossForm::Paper);
double loss_ic(const NetSpec& spec, const NetParams& params, const PhysicsCoeffs& c,
               const CollocationSet& set, BcLossForm form = BcLossForm::Paper);
double coupled_loss(const LossWeights& weights, const NetSpec& spec, const NetParams& params,
                    const PhysicsCoeffs& c, const CollocationSet& set,
                    BcLossForm form = BcLossForm::Paper);

// Columns of a dataset grid used for training and scoring: everything except
// the two pipe ends and, when present, the column nearest the offtake.
std::vector<std::size_t> interior_columns(const FieldGrid& field,
                                          std::optional<double> offtake_position);

// Boundary samples from the end columns at every time, initial samples from
// the interior columns at the first time, and collocation coordinates on the
// interior columns at every time.
CollocationSet build_collocation(const FieldGrid& field, std::optional<double> offtake_position);

}  // namespace tpinn
