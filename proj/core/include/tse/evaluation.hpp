#pragma once

#include "tse/adaptive_smoothing.hpp"
#include "tse/admm.hpp"
#include "tse/field_grid.hpp"
#include "tse/kernel_smoother.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tse {

struct EvalReport {
  double relative_error = 0.0;
  Index cell_count = 0;
  std::map<std::string, double> per_region_errors;  // diagnostics only
  Index negative_speed_cells = 0;
};

/// Relative error m_r = ||estimate - truth||_F / ||truth||_F over all cells.
double relative_error(const SpeedField& estimate, const SpeedField& truth);

/// Full report; when a mask is supplied, per-region errors are reported for
/// the observed and unobserved cells separately.
EvalReport evaluate(const SpeedField& estimate, const SpeedField& truth,
                    const ObservationMask* mask = nullptr);

enum class Method { asm_tanh, admm };

/// Shared knobs for a single estimation run. Unset sigma/tau fall back to the
/// grid defaults (half the average inter-detector spacing, half the sampling
/// interval).
struct PipelineConfig {
  std::vector<double> wave_speeds{80.0, -15.0};
  std::optional<double> sigma;
  std::optional<double> tau;
  KernelShape kernel_shape = KernelShape::exponential;
  double cutoff_radius = 6.0;
  AsmParams asm_params;
  AdmmParams admm_params;
};

KernelParams resolve_kernel_params(const PipelineConfig& config, const GridSpec& grid,
                                   Index detector_count);

struct RunResult {
  SpeedField estimate;
  ObservationMask mask;
  SpeedField observed;
  PrioriBank bank;
  KernelParams kernel;
  std::optional<AdmmResult> admm;  // present for Method::admm
};

/// truth -> detector mask -> a priori bank -> ASM or ADMM estimate.
RunResult run_estimation(const SpeedField& truth, const std::vector<Index>& detector_rows,
                         Method method, const PipelineConfig& config);

struct CoveragePoint {
  Index detectors = 0;
  double coverage = 0.0;  // observed rows / n_x
  double m_r = 0.0;
};

/// One full pipeline run per detector count, in input order.
std::vector<CoveragePoint> coverage_sweep(const SpeedField& truth,
                                          const std::vector<Index>& detector_counts,
                                          Method method, const PipelineConfig& config);

struct WaveSweepPoint {
  Index n_pairs = 0;
  Index m = 0;  // wave speeds used = 2 * n_pairs
  double objective = 0.0;
  double m_r = 0.0;
};

/// Run k of the sweep solves with the first k (c_cong, c_free) pairs; always
/// ADMM (the heuristic weight is defined for two fields only).
std::vector<WaveSweepPoint> wavespeed_sweep(const SpeedField& truth, const ObservationMask& mask,
                                            const std::vector<std::pair<double, double>>& pairs,
                                            const PipelineConfig& config);

}  // namespace tse
