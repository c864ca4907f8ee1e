#pragma once

#include "tse/field_grid.hpp"
#include "tse/kernel_smoother.hpp"

namespace tse {

struct AsmParams {
  double v_thr = 60.0;    // threshold speed, km/h
  double delta_v = 20.0;  // transition width, km/h

  void validate() const;
};

/// Heuristic congestion weight field
///   W = 1/2 * (1 + tanh((v_thr - min(z_free, z_cong)) / delta_v)),
/// element-wise, every entry strictly inside (0, 1).
Matrix asm_weight(const SpeedField& z_free, const SpeedField& z_cong, const AsmParams& params);

/// Convex combination Z = W o z_cong + (J - W) o z_free.
SpeedField asm_combine(const SpeedField& z_free, const SpeedField& z_cong, const Matrix& w_cong);

/// Conventional ASM estimate from a two-field bank. The free-flow and
/// congested fields are identified by the sign of their wave speeds, not by
/// their position in the bank.
SpeedField asm_estimate(const PrioriBank& bank, const AsmParams& params);

}  // namespace tse
