#include "tse/admm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tse {

void AdmmParams::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("admm params: beta must be positive");
  if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) {
    throw std::invalid_argument("admm params: tolerances must be positive");
  }
  if (max_iters < 1) throw std::invalid_argument("admm params: max_iters must be at least 1");
}

Matrix WeightBank::sum() const {
  Matrix s = weights.front();
  for (std::size_t i = 1; i < weights.size(); ++i) s += weights[i];
  return s;
}

Matrix fuse(const WeightBank& weights, const PrioriBank& bank) {
  Matrix f = weights.weights.front() * bank.fields.front().values;
  for (Index i = 1; i < weights.size(); ++i) {
    f += weights.weights[i] * bank.fields[i].values;
  }
  return f;
}

namespace {

// Observed-cell indicator and observed values with missing entries zeroed,
// so element-wise products never touch NaN.
struct MaskedData {
  Matrix m;
  Matrix z;
};

MaskedData masked_data(const SpeedField& observed, const ObservationMask& mask) {
  observed.validate_shape();
  mask.validate();
  if (!(observed.grid == mask.grid)) {
    throw std::invalid_argument("observed field and mask are on different grids");
  }
  Matrix m = ((mask.mask >= 0.5) && observed.values.isFinite()).cast<double>();
  Matrix z = (m >= 0.5).select(observed.values, 0.0);
  return {std::move(m), std::move(z)};
}

void check_bank(const PrioriBank& bank, const GridSpec& grid) {
  if (bank.size() < 1) throw std::invalid_argument("a priori bank is empty");
  for (const SpeedField& f : bank.fields) {
    f.validate_shape();
    if (!(f.grid == grid)) throw std::invalid_argument("bank field is on a different grid");
    if (!f.dense()) throw std::invalid_argument("bank fields must be dense");
  }
}

double sq_norm(const Matrix& a) { return (a * a).sum(); }

}  // namespace

double objective(const WeightBank& weights, const PrioriBank& bank, const SpeedField& observed,
                 const ObservationMask& mask) {
  if (weights.size() != bank.size()) {
    throw std::invalid_argument("weight count does not match bank size");
  }
  check_bank(bank, observed.grid);
  const MaskedData md = masked_data(observed, mask);
  const Matrix r = md.m * (fuse(weights, bank) - md.z);
  return 0.5 * sq_norm(r);
}

double augmented_lagrangian(const Matrix& z_hat, const WeightBank& weights, const Matrix& lambda1,
                            const Matrix& lambda2, const PrioriBank& bank,
                            const SpeedField& observed, const ObservationMask& mask, double beta) {
  const MaskedData md = masked_data(observed, mask);
  const Matrix f = fuse(weights, bank);
  const Matrix s = weights.sum();
  const Matrix fusion_gap = z_hat - f;
  const Matrix sum_gap = s - 1.0;
  double l = 0.5 * sq_norm(md.m * (md.z - z_hat));
  l += (lambda1 * fusion_gap).sum() + 0.5 * beta * sq_norm(fusion_gap);
  l += (lambda2 * sum_gap).sum() + 0.5 * beta * sq_norm(sum_gap);
  return l;
}

AdmmState init_state(const PrioriBank& bank, const SpeedField& observed,
                     const ObservationMask& mask) {
  check_bank(bank, observed.grid);
  const MaskedData md = masked_data(observed, mask);
  if (!(md.m >= 0.5).any()) {
    throw std::invalid_argument("mask selects no observations");
  }
  const GridSpec& g = bank.grid();
  const double m = static_cast<double>(bank.size());

  AdmmState state;
  state.weights.weights.assign(bank.size(), Matrix::Constant(g.n_x, g.n_t, 1.0 / m));
  state.z_hat = fuse(state.weights, bank);
  state.lambda1 = Matrix::Zero(g.n_x, g.n_t);
  state.lambda2 = Matrix::Zero(g.n_x, g.n_t);
  state.prev_z_hat = state.z_hat;
  state.prev_weights = state.weights;
  return state;
}

Matrix update_z_hat(const AdmmState& state, const PrioriBank& bank, const SpeedField& observed,
                    const ObservationMask& mask, double beta) {
  const MaskedData md = masked_data(observed, mask);
  const Matrix f = fuse(state.weights, bank);
  return (md.m * md.z - state.lambda1 + beta * f) / (md.m + beta);
}

Matrix update_weight(Index i, const AdmmState& state, const PrioriBank& bank, double beta) {
  if (i < 0 || i >= bank.size()) {
    throw std::invalid_argument("weight index " + std::to_string(i) + " out of range");
  }
  const Matrix& zi = bank.fields[i].values;
  Matrix cross = Matrix::Zero(zi.rows(), zi.cols());
  for (Index r = 0; r < bank.size(); ++r) {
    if (r == i) continue;
    cross += state.weights.weights[r] * (bank.fields[r].values * zi + 1.0);
  }
  const Matrix numer =
      beta * (state.z_hat * zi + 1.0 - cross) + state.lambda1 * zi - state.lambda2;
  const Matrix denom = beta * (zi * zi + 1.0);
  return numer / denom;
}

std::pair<Matrix, Matrix> update_duals(const AdmmState& state, const PrioriBank& bank,
                                       double beta) {
  Matrix l1 = state.lambda1 + beta * (state.z_hat - fuse(state.weights, bank));
  Matrix l2 = state.lambda2 + beta * (state.weights.sum() - 1.0);
  return {std::move(l1), std::move(l2)};
}

std::pair<double, double> residuals(const AdmmState& state, const PrioriBank& bank, double beta) {
  if (state.iter < 1) {
    throw std::invalid_argument("no iterate yet");
  }
  const Matrix f = fuse(state.weights, bank);
  const Matrix s = state.weights.sum();
  const double primal = std::sqrt(sq_norm(state.z_hat - f) + sq_norm(s - 1.0));

  double dual_sq = sq_norm(state.z_hat - state.prev_z_hat);
  for (Index i = 0; i < state.weights.size(); ++i) {
    dual_sq += sq_norm(state.weights.weights[i] - state.prev_weights.weights[i]);
  }
  return {primal, beta * std::sqrt(dual_sq)};
}

AdmmResult solve(const SpeedField& observed, const ObservationMask& mask, const PrioriBank& bank,
                 const AdmmParams& params) {
  params.validate();
  AdmmState state = init_state(bank, observed, mask);

  const double n = static_cast<double>(bank.grid().cell_count());
  const double m = static_cast<double>(bank.size());
  const double beta = params.beta;
  bool converged = false;

  for (Index it = 1; it <= params.max_iters; ++it) {
    state.prev_z_hat = state.z_hat;
    state.prev_weights = state.weights;

    state.z_hat = update_z_hat(state, bank, observed, mask, beta);
    for (Index i = 0; i < bank.size(); ++i) {
      state.weights.weights[i] = update_weight(i, state, bank, beta);
    }
    auto [l1, l2] = update_duals(state, bank, beta);
    state.lambda1 = std::move(l1);
    state.lambda2 = std::move(l2);
    state.iter = it;

    const auto [r_primal, r_dual] = residuals(state, bank, beta);
    const double obj = objective(state.weights, bank, observed, mask);
    state.primal_residuals.push_back(r_primal);
    state.dual_residuals.push_back(r_dual);
    state.objectives.push_back(obj);

    if (!std::isfinite(r_primal) || !std::isfinite(r_dual) || !std::isfinite(obj)) {
      throw std::runtime_error("divergence detected at iteration " + std::to_string(it));
    }

    const Matrix f = fuse(state.weights, bank);
    const Matrix s = state.weights.sum();
    const double iterate_scale =
        std::max(std::sqrt(sq_norm(state.z_hat) + sq_norm(s)), std::sqrt(sq_norm(f) + n));
    const double dual_scale = std::sqrt(sq_norm(state.lambda1) + sq_norm(state.lambda2));
    const double eps_primal = params.eps_abs * std::sqrt(2.0 * n) + params.eps_rel * iterate_scale;
    const double eps_dual =
        params.eps_abs * std::sqrt((m + 1.0) * n) + params.eps_rel * dual_scale;
    if (r_primal <= eps_primal && r_dual <= eps_dual) {
      converged = true;
      break;
    }
  }

  AdmmResult result;
  result.weights = state.weights;
  result.fused_field = SpeedField{bank.grid(), fuse(state.weights, bank)};
  result.converged = converged;
  result.iters = state.iter;
  result.final_primal = state.primal_residuals.back();
  result.final_dual = state.dual_residuals.back();
  result.objective = state.objectives.back();
  result.objective_history = std::move(state.objectives);
  result.primal_history = std::move(state.primal_residuals);
  result.dual_history = std::move(state.dual_residuals);
  return result;
}

}  // namespace tse
