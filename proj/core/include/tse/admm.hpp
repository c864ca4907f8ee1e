#pragma once

#include "tse/field_grid.hpp"
#include "tse/kernel_smoother.hpp"

#include <utility>
#include <vector>

namespace tse {

struct AdmmParams {
  double beta = 1.0;       // penalty / step size
  double eps_abs = 1e-6;   // absolute feasibility tolerance
  double eps_rel = 1e-4;   // relative feasibility tolerance
  Index max_iters = 5000;

  void validate() const;
};

/// Superposition weights, one matrix per a priori field. At a converged
/// solution they sum cell-wise to one; individual entries are not box
/// constrained and may leave [0, 1].
struct WeightBank {
  std::vector<Matrix> weights;

  Index size() const { return static_cast<Index>(weights.size()); }
  Matrix sum() const;
};

/// Fused estimate sum_i W^i o Z^i.
Matrix fuse(const WeightBank& weights, const PrioriBank& bank);

/// Solver iterate: auxiliary estimate, weights, both dual matrices, and the
/// previous completed iterate (needed by the dual residual).
struct AdmmState {
  Matrix z_hat;
  WeightBank weights;
  Matrix lambda1;  // dual of z_hat = sum_i W^i o Z^i
  Matrix lambda2;  // dual of sum_i W^i = J
  Index iter = 0;

  Matrix prev_z_hat;
  WeightBank prev_weights;

  std::vector<double> primal_residuals;
  std::vector<double> dual_residuals;
  std::vector<double> objectives;
};

struct AdmmResult {
  SpeedField fused_field;  // sum_i W^i o Z^i recomputed from the final weights
  WeightBank weights;
  bool converged = false;
  Index iters = 0;
  double final_primal = 0.0;
  double final_dual = 0.0;
  double objective = 0.0;
  std::vector<double> objective_history;
  std::vector<double> primal_history;
  std::vector<double> dual_history;
};

/// Masked squared-Frobenius misfit 1/2 || M o (sum_i W^i o Z^i - Z) ||_F^2.
/// The unsquared and squared forms share their minimizers; the squared form
/// is the one that appears in the augmented Lagrangian.
double objective(const WeightBank& weights, const PrioriBank& bank, const SpeedField& observed,
                 const ObservationMask& mask);

/// Augmented Lagrangian
///   L_beta = 1/2 ||M o (Z - Zh)||_F^2
///          + <L1, Zh - F> + beta/2 ||Zh - F||_F^2
///          + <L2, S - J>  + beta/2 ||S - J||_F^2
/// with F = sum_i W^i o Z^i and S = sum_i W^i.
double augmented_lagrangian(const Matrix& z_hat, const WeightBank& weights, const Matrix& lambda1,
                            const Matrix& lambda2, const PrioriBank& bank,
                            const SpeedField& observed, const ObservationMask& mask, double beta);

/// Uniform weights W^i = J/m, z_hat = sum_i W^i o Z^i, zero duals.
AdmmState init_state(const PrioriBank& bank, const SpeedField& observed,
                     const ObservationMask& mask);

/// Closed-form block minimizer of L_beta in z_hat:
///   Zh = (M o Z - L1 + beta * F) / (M + beta * J),  element-wise.
Matrix update_z_hat(const AdmmState& state, const PrioriBank& bank, const SpeedField& observed,
                    const ObservationMask& mask, double beta);

/// Closed-form block minimizer of L_beta in W^i:
///   W^i = (beta * (Zh o Z^i + J - sum_{r!=i} W^r o (Z^r o Z^i + J))
///          + L1 o Z^i - L2) / (beta * (Z^i o Z^i + J)).
/// The trailing term is -L2: it is the multiplier of the sum-to-one
/// constraint that enters the W^i gradient directly.
Matrix update_weight(Index i, const AdmmState& state, const PrioriBank& bank, double beta);

/// Gradient-ascent dual steps, evaluated at the current primal variables:
///   L1 + beta (Zh - F),  L2 + beta (S - J).
std::pair<Matrix, Matrix> update_duals(const AdmmState& state, const PrioriBank& bank,
                                       double beta);

/// Primal residual sqrt(||Zh - F||_F^2 + ||S - J||_F^2) and dual residual
/// beta * sqrt(||Zh - Zh_prev||_F^2 + sum_i ||W^i - W^i_prev||_F^2).
std::pair<double, double> residuals(const AdmmState& state, const PrioriBank& bank, double beta);

/// Full solver loop: z_hat update, Gauss-Seidel W sweep in bank order, dual
/// ascent, residual-based stop. Deterministic for identical inputs.
AdmmResult solve(const SpeedField& observed, const ObservationMask& mask, const PrioriBank& bank,
                 const AdmmParams& params);

}  // namespace tse
