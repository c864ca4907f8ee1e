#include "tse/adaptive_smoothing.hpp"

#include <stdexcept>

namespace tse {

void AsmParams::validate() const {
  if (!(v_thr > 0.0) || !(delta_v > 0.0)) {
    throw std::invalid_argument("asm params: v_thr and delta_v must be positive");
  }
}

Matrix asm_weight(const SpeedField& z_free, const SpeedField& z_cong, const AsmParams& params) {
  params.validate();
  z_free.validate_shape();
  z_cong.validate_shape();
  if (!(z_free.grid == z_cong.grid)) {
    throw std::invalid_argument("a priori fields are on different grids");
  }
  if (!z_free.dense() || !z_cong.dense()) {
    throw std::invalid_argument("a priori fields must be dense");
  }
  return 0.5 * (1.0 + (((params.v_thr - z_free.values.min(z_cong.values)) / params.delta_v).tanh()));
}

SpeedField asm_combine(const SpeedField& z_free, const SpeedField& z_cong, const Matrix& w_cong) {
  if (!(z_free.grid == z_cong.grid) || w_cong.rows() != z_free.values.rows() ||
      w_cong.cols() != z_free.values.cols()) {
    throw std::invalid_argument("combine: shapes do not match");
  }
  Matrix out = w_cong * z_cong.values + (1.0 - w_cong) * z_free.values;
  return {z_free.grid, std::move(out)};
}

SpeedField asm_estimate(const PrioriBank& bank, const AsmParams& params) {
  if (bank.size() != 2) {
    throw std::invalid_argument("ASM requires exactly two a priori fields");
  }
  const double c0 = bank.wave_speeds[0];
  const double c1 = bank.wave_speeds[1];
  if (!((c0 > 0.0 && c1 < 0.0) || (c0 < 0.0 && c1 > 0.0))) {
    throw std::invalid_argument(
        "ASM needs one positive (free-flow) and one negative (congested) wave speed");
  }
  const SpeedField& z_free = c0 > 0.0 ? bank.fields[0] : bank.fields[1];
  const SpeedField& z_cong = c0 > 0.0 ? bank.fields[1] : bank.fields[0];
  return asm_combine(z_free, z_cong, asm_weight(z_free, z_cong, params));
}

}  // namespace tse
