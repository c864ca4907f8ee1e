#include "tse/evaluation.hpp"

#include <cmath>
#include <stdexcept>

namespace tse {

double relative_error(const SpeedField& estimate, const SpeedField& truth) {
  estimate.validate_shape();
  truth.validate_shape();
  if (!(estimate.grid == truth.grid)) {
    throw std::invalid_argument("estimate and truth are on different grids");
  }
  if (!estimate.dense() || !truth.dense()) {
    throw std::invalid_argument("relative error needs dense fields");
  }
  const double denom = std::sqrt((truth.values * truth.values).sum());
  if (denom == 0.0) {
    throw std::invalid_argument("undefined relative error: truth field is identically zero");
  }
  const Matrix diff = estimate.values - truth.values;
  return std::sqrt((diff * diff).sum()) / denom;
}

namespace {

double region_error(const Matrix& diff, const Matrix& truth, const Matrix& region) {
  const double denom = (region * truth * truth).sum();
  if (denom <= 0.0) return 0.0;
  return std::sqrt((region * diff * diff).sum() / denom);
}

}  // namespace

EvalReport evaluate(const SpeedField& estimate, const SpeedField& truth,
                    const ObservationMask* mask) {
  EvalReport report;
  report.relative_error = relative_error(estimate, truth);
  report.cell_count = truth.grid.cell_count();
  report.negative_speed_cells = static_cast<Index>((estimate.values < 0.0).count());
  if (mask != nullptr) {
    mask->validate();
    if (!(mask->grid == truth.grid)) {
      throw std::invalid_argument("mask is on a different grid");
    }
    const Matrix diff = estimate.values - truth.values;
    const Matrix observed = (mask->mask >= 0.5).cast<double>();
    report.per_region_errors["observed"] = region_error(diff, truth.values, observed);
    report.per_region_errors["unobserved"] = region_error(diff, truth.values, 1.0 - observed);
  }
  return report;
}

KernelParams resolve_kernel_params(const PipelineConfig& config, const GridSpec& grid,
                                   Index detector_count) {
  KernelParams params = default_kernel_params(grid, detector_count);
  if (config.sigma) params.sigma = *config.sigma;
  if (config.tau) params.tau = *config.tau;
  params.shape = config.kernel_shape;
  params.cutoff_radius = config.cutoff_radius;
  params.validate();
  return params;
}

RunResult run_estimation(const SpeedField& truth, const std::vector<Index>& detector_rows,
                         Method method, const PipelineConfig& config) {
  if (config.wave_speeds.empty()) {
    throw std::invalid_argument("wave speed list must be non-empty");
  }
  ObservationMask mask = detector_mask(truth.grid, detector_rows);
  SpeedField observed = apply_mask(truth, mask);
  const KernelParams kernel =
      resolve_kernel_params(config, truth.grid, static_cast<Index>(detector_rows.size()));
  PrioriBank bank = build_priori_bank(observed, mask, config.wave_speeds, kernel);

  RunResult result{SpeedField{}, std::move(mask), std::move(observed), std::move(bank), kernel,
                   std::nullopt};
  if (method == Method::asm_tanh) {
    result.estimate = asm_estimate(result.bank, config.asm_params);
  } else {
    AdmmResult admm = solve(result.observed, result.mask, result.bank, config.admm_params);
    result.estimate = admm.fused_field;
    result.admm = std::move(admm);
  }
  return result;
}

std::vector<CoveragePoint> coverage_sweep(const SpeedField& truth,
                                          const std::vector<Index>& detector_counts,
                                          Method method, const PipelineConfig& config) {
  if (detector_counts.empty()) {
    throw std::invalid_argument("detector count list must be non-empty");
  }
  std::vector<CoveragePoint> points;
  points.reserve(detector_counts.size());
  for (Index count : detector_counts) {
    const std::vector<Index> rows = equally_spaced_detectors(truth.grid, count);
    const RunResult run = run_estimation(truth, rows, method, config);
    CoveragePoint point;
    point.detectors = count;
    point.coverage = static_cast<double>(rows.size()) / static_cast<double>(truth.grid.n_x);
    point.m_r = relative_error(run.estimate, truth);
    points.push_back(point);
  }
  return points;
}

std::vector<WaveSweepPoint> wavespeed_sweep(const SpeedField& truth, const ObservationMask& mask,
                                            const std::vector<std::pair<double, double>>& pairs,
                                            const PipelineConfig& config) {
  if (pairs.empty()) {
    throw std::invalid_argument("wave speed pair list must be non-empty");
  }
  truth.validate_shape();
  mask.validate();
  if (!(truth.grid == mask.grid)) {
    throw std::invalid_argument("truth and mask are on different grids");
  }
  const SpeedField observed = apply_mask(truth, mask);
  const Index observed_rows =
      static_cast<Index>((mask.mask.rowwise().maxCoeff() >= 0.5).count());
  const KernelParams kernel =
      resolve_kernel_params(config, truth.grid, std::max<Index>(observed_rows, 1));

  std::vector<WaveSweepPoint> points;
  points.reserve(pairs.size());
  std::vector<double> speeds;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    speeds.push_back(pairs[k].first);
    speeds.push_back(pairs[k].second);
    PrioriBank bank = build_priori_bank(observed, mask, speeds, kernel);
    const AdmmResult admm = solve(observed, mask, bank, config.admm_params);
    WaveSweepPoint point;
    point.n_pairs = static_cast<Index>(k + 1);
    point.m = static_cast<Index>(speeds.size());
    point.objective = admm.objective;
    point.m_r = relative_error(admm.fused_field, truth);
    points.push_back(point);
  }
  return points;
}

}  // namespace tse
