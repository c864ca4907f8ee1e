#include "tse/kernel_smoother.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tse {

namespace {
constexpr double kKmhToMs = 1.0 / 3.6;
}

void KernelParams::validate() const {
  if (!(sigma > 0.0) || !(tau > 0.0) || !(cutoff_radius > 0.0)) {
    throw std::invalid_argument("kernel params: sigma, tau and cutoff_radius must be positive");
  }
}

double kernel_weight(double dx, double dt_shifted, const KernelParams& params) {
  if (std::abs(dx) > params.cutoff_radius * params.sigma ||
      std::abs(dt_shifted) > params.cutoff_radius * params.tau) {
    return 0.0;
  }
  switch (params.shape) {
    case KernelShape::exponential:
      return std::exp(-(std::abs(dx) / params.sigma + std::abs(dt_shifted) / params.tau));
    case KernelShape::gaussian:
      return std::exp(-(dx * dx / (2.0 * params.sigma * params.sigma) +
                        dt_shifted * dt_shifted / (2.0 * params.tau * params.tau)));
  }
  return 0.0;
}

SpeedField smooth_along_wave(const SpeedField& observed, const ObservationMask& mask,
                             double wave_speed_kmh, const KernelParams& params) {
  params.validate();
  observed.validate_shape();
  mask.validate();
  if (!(observed.grid == mask.grid)) {
    throw std::invalid_argument("observed field and mask are on different grids");
  }
  if (wave_speed_kmh == 0.0) {
    throw std::invalid_argument("wave speed must be nonzero");
  }

  const GridSpec& g = observed.grid;

  // Observations grouped by grid row; cells in a row share one x coordinate
  // and their columns are kept sorted for range lookups.
  struct ObsRow {
    Index j;
    double x;
    std::vector<Index> cols;
  };
  std::vector<ObsRow> obs_rows;
  for (Index j = 0; j < g.n_x; ++j) {
    ObsRow row{j, g.cell_x(j), {}};
    for (Index k = 0; k < g.n_t; ++k) {
      if (mask.mask(j, k) >= 0.5 && std::isfinite(observed.values(j, k))) {
        row.cols.push_back(k);
      }
    }
    if (!row.cols.empty()) obs_rows.push_back(std::move(row));
  }
  if (obs_rows.empty()) {
    throw std::invalid_argument("mask selects no observations");
  }

  const double c_ms = wave_speed_kmh * kKmhToMs;
  const double max_dx = params.cutoff_radius * params.sigma;
  const double max_dt = params.cutoff_radius * params.tau;

  Matrix out(g.n_x, g.n_t);

  struct RowGeom {
    const ObsRow* row;
    double dx;
    double shift;  // wave travel time dx / c
  };
  std::vector<RowGeom> geom;

  for (Index j = 0; j < g.n_x; ++j) {
    const double x = g.cell_x(j);
    geom.clear();
    for (const ObsRow& row : obs_rows) {
      const double dxn = x - row.x;
      if (std::abs(dxn) > max_dx) continue;
      geom.push_back({&row, dxn, dxn / c_ms});
    }

    for (Index k = 0; k < g.n_t; ++k) {
      const double t = g.cell_t(k);
      double num = 0.0;
      double den = 0.0;
      for (const RowGeom& rg : geom) {
        // Nonzero weight needs |t - t_n - shift| <= max_dt. Solve for the
        // observation column range and pad one cell against rounding at the
        // boundary; kernel_weight re-checks the exact cutoff.
        const double t_center = t - rg.shift;
        const double lo_f = (t_center - max_dt - g.t_min) / g.dt - 0.5;
        const double hi_f = (t_center + max_dt - g.t_min) / g.dt - 0.5;
        if (hi_f < -1.0 || lo_f > static_cast<double>(g.n_t)) continue;
        const Index k_lo = std::max<Index>(0, static_cast<Index>(std::floor(lo_f)) - 1);
        const Index k_hi = std::min<Index>(g.n_t - 1, static_cast<Index>(std::ceil(hi_f)) + 1);
        const auto& cols = rg.row->cols;
        for (auto it = std::lower_bound(cols.begin(), cols.end(), k_lo);
             it != cols.end() && *it <= k_hi; ++it) {
          const double dt_shifted = t - g.cell_t(*it) - rg.shift;
          const double w = kernel_weight(rg.dx, dt_shifted, params);
          num += w * observed.values(rg.row->j, *it);
          den += w;
        }
      }
      if (den > 0.0) {
        out(j, k) = num / den;
      } else {
        // Entire neighborhood cut off: fall back to the nearest observation
        // in scaled distance; first hit in row-major order wins ties.
        double best = std::numeric_limits<double>::infinity();
        double best_v = 0.0;
        for (const ObsRow& row : obs_rows) {
          const double dxn = x - row.x;
          const double shift = dxn / c_ms;
          for (Index kc : row.cols) {
            const double dt_shifted = t - g.cell_t(kc) - shift;
            const double d = std::abs(dxn) / params.sigma + std::abs(dt_shifted) / params.tau;
            if (d < best) {
              best = d;
              best_v = observed.values(row.j, kc);
            }
          }
        }
        out(j, k) = best_v;
      }
    }
  }

  return {g, std::move(out)};
}

PrioriBank build_priori_bank(const SpeedField& observed, const ObservationMask& mask,
                             const std::vector<double>& wave_speeds,
                             const KernelParams& params) {
  if (wave_speeds.empty()) {
    throw std::invalid_argument("wave speed list must be non-empty");
  }
  PrioriBank bank;
  bank.wave_speeds = wave_speeds;
  bank.params = params;
  bank.fields.reserve(wave_speeds.size());
  for (double c : wave_speeds) {
    bank.fields.push_back(smooth_along_wave(observed, mask, c, params));
  }
  return bank;
}

KernelParams default_kernel_params(const GridSpec& grid, Index detector_count) {
  grid.validate();
  if (detector_count < 1) {
    throw std::invalid_argument("detector count must be positive");
  }
  KernelParams params;
  params.sigma = 0.5 * grid.x_extent() / static_cast<double>(detector_count);
  params.tau = 0.5 * grid.dt;
  return params;
}

}  // namespace tse
