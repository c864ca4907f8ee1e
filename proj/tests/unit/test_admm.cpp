#include "tse/admm.hpp"

#include "oracles.hpp"
#include "tse/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace tse;

namespace {

PrioriBank bank_from(const GridSpec& grid, std::vector<Matrix> fields,
                     std::vector<double> speeds) {
  PrioriBank bank;
  bank.wave_speeds = std::move(speeds);
  for (Matrix& f : fields) bank.fields.push_back(SpeedField{grid, std::move(f)});
  return bank;
}

struct RandomInstance {
  GridSpec grid;
  SpeedField observed;
  ObservationMask mask;
  PrioriBank bank;
  AdmmState state;

  RandomInstance(std::uint64_t seed, Index n_x, Index n_t, Index m, double lo = 0.0,
                 double hi = 2.0) {
    grid = GridSpec{0.0, 0.0, 10.0, 1.0, n_x, n_t};
    SplitMix64 rng(seed);
    mask = ObservationMask{grid, oracle::random_mask(rng, n_x, n_t)};
    const Matrix truth = oracle::random_matrix(rng, n_x, n_t, lo, hi);
    observed = apply_mask(SpeedField{grid, truth}, mask);
    std::vector<Matrix> fields;
    for (Index i = 0; i < m; ++i) {
      fields.push_back(oracle::random_matrix(rng, n_x, n_t, lo, hi));
    }
    std::vector<double> speeds;
    for (Index i = 0; i < m; ++i) speeds.push_back(i % 2 == 0 ? 80.0 : -15.0);
    bank = bank_from(grid, std::move(fields), std::move(speeds));

    state = init_state(bank, observed, mask);
    // Start from a generic point rather than the solver's initialization.
    state.z_hat = oracle::random_matrix(rng, n_x, n_t, lo, hi);
    for (Index i = 0; i < m; ++i) {
      state.weights.weights[i] = oracle::random_matrix(rng, n_x, n_t, 0.0, 1.0);
    }
    state.lambda1 = oracle::random_matrix(rng, n_x, n_t, -1.0, 1.0);
    state.lambda2 = oracle::random_matrix(rng, n_x, n_t, -1.0, 1.0);
  }
};

}  // namespace

TEST_CASE("objective: exact fit on the observed set is zero") {
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 2, 2};
  const Matrix z = Matrix::Constant(2, 2, 50.0);
  const PrioriBank bank = bank_from(grid, {z}, {80.0});
  WeightBank w;
  w.weights.push_back(Matrix::Ones(2, 2));
  const ObservationMask mask{grid, Matrix::Ones(2, 2)};
  CHECK(objective(w, bank, SpeedField{grid, z}, mask) == 0.0);
}

TEST_CASE("objective: unit offset on k observed cells costs k/2") {
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 2, 2};
  Matrix m(2, 2);
  m << 1, 1, 1, 0;  // k = 3
  const Matrix z = Matrix::Constant(2, 2, 50.0);
  const PrioriBank bank = bank_from(grid, {z + 1.0}, {80.0});
  WeightBank w;
  w.weights.push_back(Matrix::Ones(2, 2));
  const double obj = objective(w, bank, SpeedField{grid, z}, ObservationMask{grid, m});
  CHECK(obj == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("objective: matches the scalar-loop reference on a random instance") {
  RandomInstance inst(31, 3, 4, 2, 10.0, 100.0);
  const double got = objective(inst.state.weights, inst.bank, inst.observed, inst.mask);
  const double want =
      oracle::objective_reference(inst.state.weights, inst.bank, inst.observed, inst.mask);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("update_z_hat: reduces to the fused field with zero mask and duals") {
  RandomInstance inst(7, 2, 3, 2);
  inst.state.lambda1.setZero();
  ObservationMask zero_mask{inst.grid, Matrix::Zero(2, 3)};
  const Matrix z = update_z_hat(inst.state, inst.bank, inst.observed, zero_mask, 1.0);
  const Matrix f = fuse(inst.state.weights, inst.bank);
  CHECK(((z - f).abs() < 1e-15).all());
}

TEST_CASE("update_z_hat: beta limits pull toward data or fusion") {
  RandomInstance inst(8, 2, 3, 2, 10.0, 100.0);
  inst.state.lambda1.setZero();
  ObservationMask ones{inst.grid, Matrix::Ones(2, 3)};
  SplitMix64 rng(77);
  SpeedField z_obs = inst.observed;
  z_obs.values = oracle::random_matrix(rng, 2, 3, 10.0, 100.0);

  const Matrix f = fuse(inst.state.weights, inst.bank);
  const Matrix big = update_z_hat(inst.state, inst.bank, z_obs, ones, 1e12);
  CHECK(((big - f).abs() < 1e-6).all());
  const Matrix small = update_z_hat(inst.state, inst.bank, z_obs, ones, 1e-12);
  CHECK(((small - z_obs.values).abs() < 1e-6).all());
}

TEST_CASE("update_z_hat: matches the subproblem gradient-descent minimizer") {
  RandomInstance inst(11, 2, 3, 2);
  const Matrix closed = update_z_hat(inst.state, inst.bank, inst.observed, inst.mask, 1.0);
  const Matrix gd =
      oracle::z_hat_subproblem_gd(inst.state, inst.bank, inst.observed, inst.mask, 1.0, 300);
  CHECK(((closed - gd).abs() < 1e-8).all());
}

TEST_CASE("update_weight: m=1 with z_hat equal to the field gives the all-ones weight") {
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 2, 2};
  const Matrix z1 = Matrix::Constant(2, 2, 30.0);
  const PrioriBank bank = bank_from(grid, {z1}, {80.0});
  const ObservationMask mask{grid, Matrix::Ones(2, 2)};
  AdmmState state = init_state(bank, SpeedField{grid, z1}, mask);
  state.z_hat = z1;
  const Matrix w = update_weight(0, state, bank, 1.0);
  CHECK(((w - 1.0).abs() < 1e-15).all());
}

TEST_CASE("update_weight: matches the subproblem gradient-descent minimizer") {
  RandomInstance inst(13, 2, 2, 2);
  for (Index i = 0; i < 2; ++i) {
    const Matrix closed = update_weight(i, inst.state, inst.bank, 1.0);
    const Matrix gd = oracle::weight_subproblem_gd(i, inst.state, inst.bank, 1.0, 20000);
    CHECK(((closed - gd).abs() < 1e-8).all());
  }
  CHECK_THROWS_AS(update_weight(5, inst.state, inst.bank, 1.0), std::invalid_argument);
}

TEST_CASE("updates zero the finite-difference gradient of the augmented Lagrangian") {
  // Settles the printed-formula ambiguity: with the -Lambda2 form both block
  // updates are stationary points of L_beta; the -Lambda1 variant is not.
  for (const std::uint64_t seed : {17u, 18u, 19u}) {
    RandomInstance inst(seed, 3, 3, 2);
    const double beta = 1.0;
    inst.state.z_hat = update_z_hat(inst.state, inst.bank, inst.observed, inst.mask, beta);
    Matrix grad =
        oracle::fd_gradient_z_hat(inst.state, inst.bank, inst.observed, inst.mask, beta, 1e-6);
    CHECK(grad.abs().maxCoeff() < 1e-8);

    for (Index i = 0; i < 2; ++i) {
      inst.state.weights.weights[i] = update_weight(i, inst.state, inst.bank, beta);
      grad = oracle::fd_gradient_weight(i, inst.state, inst.bank, inst.observed, inst.mask,
                                        beta, 1e-6);
      CHECK(grad.abs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("update_duals: zero residuals leave the duals unchanged") {
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 2, 2};
  const Matrix z1 = Matrix::Constant(2, 2, 30.0);
  const PrioriBank bank = bank_from(grid, {z1}, {80.0});
  const ObservationMask mask{grid, Matrix::Ones(2, 2)};
  AdmmState state = init_state(bank, SpeedField{grid, z1}, mask);
  state.lambda1 = Matrix::Constant(2, 2, 0.25);
  state.lambda2 = Matrix::Constant(2, 2, -0.5);
  const auto [l1, l2] = update_duals(state, bank, 1.0);
  CHECK((l1 == state.lambda1).all());
  CHECK((l2 == state.lambda2).all());
}

TEST_CASE("update_duals: constant fusion gap moves lambda1 by that constant") {
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 2, 2};
  const Matrix z1 = Matrix::Constant(2, 2, 30.0);
  const PrioriBank bank = bank_from(grid, {z1}, {80.0});
  const ObservationMask mask{grid, Matrix::Ones(2, 2)};
  AdmmState state = init_state(bank, SpeedField{grid, z1}, mask);
  state.z_hat += 0.75;
  const auto [l1, l2] = update_duals(state, bank, 1.0);
  CHECK(((l1 - 0.75).abs() < 1e-15).all());
  CHECK((l2 == state.lambda2).all());
}

TEST_CASE("two solver iterations reproduce the hand-stepped scalar trace") {
  // 1x1 grid, observed z = 2, single a priori value 3, beta = 1. Worked by
  // hand from the update formulas:
  //   it 1: z_hat 2.5, W 0.85, L1 -0.05, L2 -0.15
  //   it 2: z_hat 2.3, W 0.79, L1 -0.12, L2 -0.36
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 1, 1};
  const PrioriBank bank = bank_from(grid, {Matrix::Constant(1, 1, 3.0)}, {80.0});
  const SpeedField observed{grid, Matrix::Constant(1, 1, 2.0)};
  const ObservationMask mask{grid, Matrix::Ones(1, 1)};
  const double beta = 1.0;

  AdmmState state = init_state(bank, observed, mask);
  CHECK(state.z_hat(0, 0) == 3.0);

  for (int it = 1; it <= 2; ++it) {
    state.prev_z_hat = state.z_hat;
    state.prev_weights = state.weights;
    state.z_hat = update_z_hat(state, bank, observed, mask, beta);
    state.weights.weights[0] = update_weight(0, state, bank, beta);
    auto [l1, l2] = update_duals(state, bank, beta);
    state.lambda1 = std::move(l1);
    state.lambda2 = std::move(l2);
    state.iter = it;
    if (it == 1) {
      CHECK(state.z_hat(0, 0) == doctest::Approx(2.5).epsilon(1e-14));
      CHECK(state.weights.weights[0](0, 0) == doctest::Approx(0.85).epsilon(1e-14));
      CHECK(state.lambda1(0, 0) == doctest::Approx(-0.05).epsilon(1e-12));
      CHECK(state.lambda2(0, 0) == doctest::Approx(-0.15).epsilon(1e-12));
      const auto [rp, rd] = residuals(state, bank, beta);
      CHECK(rp == doctest::Approx(std::sqrt(0.025)).epsilon(1e-12));
      CHECK(rd == doctest::Approx(std::sqrt(0.2725)).epsilon(1e-12));
    } else {
      CHECK(state.z_hat(0, 0) == doctest::Approx(2.3).epsilon(1e-14));
      CHECK(state.weights.weights[0](0, 0) == doctest::Approx(0.79).epsilon(1e-14));
      CHECK(state.lambda1(0, 0) == doctest::Approx(-0.12).epsilon(1e-12));
      CHECK(state.lambda2(0, 0) == doctest::Approx(-0.36).epsilon(1e-12));
    }
  }
}

TEST_CASE("residuals: feasible stationary iterate reports zero, scalar case checks out") {
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 1, 1};
  const PrioriBank bank = bank_from(grid, {Matrix::Constant(1, 1, 3.0)}, {80.0});
  const ObservationMask mask{grid, Matrix::Ones(1, 1)};
  AdmmState state = init_state(bank, SpeedField{grid, Matrix::Constant(1, 1, 3.0)}, mask);

  CHECK_THROWS_WITH_AS(residuals(state, bank, 1.0), "no iterate yet", std::invalid_argument);

  state.iter = 1;
  auto [rp, rd] = residuals(state, bank, 1.0);
  CHECK(rp == 0.0);
  CHECK(rd == 0.0);

  // Feasible z_hat but the weight sum overshooting by 0.1 -> primal 0.1.
  state.weights.weights[0] = Matrix::Constant(1, 1, 1.1);
  state.z_hat = fuse(state.weights, bank);
  std::tie(rp, rd) = residuals(state, bank, 1.0);
  CHECK(rp == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("solve: m=1 is forced to the single a priori field") {
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 3, 4};
  SplitMix64 rng(3);
  const Matrix z1 = oracle::random_matrix(rng, 3, 4, 20.0, 90.0);
  const Matrix truth = oracle::random_matrix(rng, 3, 4, 20.0, 90.0);
  const PrioriBank bank = bank_from(grid, {z1}, {80.0});
  Matrix m = Matrix::Zero(3, 4);
  m.row(1).setOnes();
  const ObservationMask mask{grid, m};
  const AdmmResult result =
      solve(apply_mask(SpeedField{grid, truth}, mask), mask, bank, AdmmParams{});
  CHECK(result.converged);
  CHECK(((result.weights.weights[0] - 1.0).abs() < 1e-4).all());
  CHECK(((result.fused_field.values - z1).abs() < 1e-2).all());
}

TEST_CASE("solve: m=2 objective matches the constraint-eliminated descent oracle") {
  RandomInstance inst(41, 4, 5, 2, 10.0, 100.0);
  // Keep the per-cell curvature away from zero so plain gradient descent
  // converges within the iteration budget.
  const Matrix gap = (inst.bank.fields[0].values - inst.bank.fields[1].values).abs();
  REQUIRE(gap.minCoeff() > 0.5);

  AdmmParams params;
  params.eps_abs = 1e-10;
  params.eps_rel = 1e-8;
  params.max_iters = 20000;
  const AdmmResult admm = solve(inst.observed, inst.mask, inst.bank, params);
  CHECK(admm.converged);

  const WeightBank gd = oracle::eliminated_gd_m2(inst.observed, inst.mask, inst.bank, 3000000);
  const double gd_obj = objective(gd, inst.bank, inst.observed, inst.mask);
  CHECK(std::abs(admm.objective - gd_obj) < 1e-6);
}

TEST_CASE("solve: converged runs satisfy the stated feasibility bounds") {
  RandomInstance inst(43, 4, 5, 3, 10.0, 100.0);
  const AdmmResult result = solve(inst.observed, inst.mask, inst.bank, AdmmParams{});
  CHECK(result.converged);
  const Matrix s = result.weights.sum();
  const double n = static_cast<double>(inst.grid.cell_count());
  CHECK(std::sqrt(((s - 1.0) * (s - 1.0)).sum()) / std::sqrt(n) < 1e-4);
  // Fused output is recomputed from the returned weights, bit for bit.
  CHECK((result.fused_field.values == fuse(result.weights, inst.bank)).all());
  // Primal residual fell below its first-iteration value.
  CHECK(result.primal_history.back() < result.primal_history.front());
  // Final objective no worse than the best single-member constant assignment.
  double best_single = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < inst.bank.size(); ++i) {
    WeightBank constant;
    for (Index r = 0; r < inst.bank.size(); ++r) {
      constant.weights.push_back(r == i ? Matrix::Ones(4, 5) : Matrix::Zero(4, 5));
    }
    best_single =
        std::min(best_single, objective(constant, inst.bank, inst.observed, inst.mask));
  }
  CHECK(result.objective <= best_single + 1e-9);
}

TEST_CASE("solve: equal a priori fields fuse to that field") {
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 3, 3};
  SplitMix64 rng(55);
  const Matrix f = oracle::random_matrix(rng, 3, 3, 20.0, 90.0);
  const Matrix truth = oracle::random_matrix(rng, 3, 3, 20.0, 90.0);
  const PrioriBank bank = bank_from(grid, {f, f}, {80.0, -15.0});
  const ObservationMask mask{grid, Matrix::Ones(3, 3)};
  const AdmmResult result = solve(SpeedField{grid, truth}, mask, bank, AdmmParams{});
  CHECK(result.converged);
  CHECK(((result.fused_field.values - f).abs() < 1e-3).all());
}

TEST_CASE("solve: deterministic bit for bit") {
  RandomInstance inst(47, 4, 5, 2, 10.0, 100.0);
  const AdmmResult a = solve(inst.observed, inst.mask, inst.bank, AdmmParams{});
  const AdmmResult b = solve(inst.observed, inst.mask, inst.bank, AdmmParams{});
  CHECK(a.iters == b.iters);
  CHECK((a.fused_field.values == b.fused_field.values).all());
  for (Index i = 0; i < 2; ++i) {
    CHECK((a.weights.weights[i] == b.weights.weights[i]).all());
  }
  CHECK(a.objective == b.objective);
  CHECK(a.final_primal == b.final_primal);
}

TEST_CASE("solve: rejects an empty mask and reports divergence") {
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 2, 2};
  const Matrix z1 = Matrix::Constant(2, 2, 30.0);
  const PrioriBank bank = bank_from(grid, {z1}, {80.0});
  const SpeedField observed{grid, Matrix::Constant(2, 2, 40.0)};
  CHECK_THROWS_AS(solve(observed, ObservationMask{grid, Matrix::Zero(2, 2)}, bank, AdmmParams{}),
                  std::invalid_argument);

  // Values near the double overflow limit blow up the element-wise products.
  const PrioriBank huge = bank_from(grid, {Matrix::Constant(2, 2, 1e200)}, {80.0});
  const SpeedField observed_huge{grid, Matrix::Constant(2, 2, 1e200)};
  CHECK_THROWS_WITH_AS(
      solve(observed_huge, ObservationMask{grid, Matrix::Ones(2, 2)}, huge, AdmmParams{}),
      doctest::Contains("divergence detected"), std::runtime_error);
}

TEST_CASE("solve: trace histories are aligned and non-finite free") {
  RandomInstance inst(53, 3, 3, 2, 10.0, 100.0);
  const AdmmResult result = solve(inst.observed, inst.mask, inst.bank, AdmmParams{});
  CHECK(result.objective_history.size() == static_cast<std::size_t>(result.iters));
  CHECK(result.primal_history.size() == result.objective_history.size());
  CHECK(result.dual_history.size() == result.objective_history.size());
  for (double v : result.objective_history) CHECK(std::isfinite(v));
}
