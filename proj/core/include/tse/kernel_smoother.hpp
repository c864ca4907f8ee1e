#pragma once

#include "tse/field_grid.hpp"

#include <vector>

namespace tse {

enum class KernelShape {
  exponential,  // exp(-(|dx|/sigma + |dt|/tau))
  gaussian,     // exp(-(dx^2/(2 sigma^2) + dt^2/(2 tau^2)))
};

struct KernelParams {
  double sigma = 1.0;  // space smoothing width, m
  double tau = 1.0;    // time smoothing width, s
  KernelShape shape = KernelShape::exponential;
  double cutoff_radius = 6.0;  // weight is exactly 0 beyond cutoff*sigma / cutoff*tau

  void validate() const;
};

/// Kernel weight phi(dx, dt_shifted). dt_shifted is the time offset after
/// subtracting the wave travel time dx/c, so smoothing acts along the
/// characteristic line rather than isotropically.
double kernel_weight(double dx, double dt_shifted, const KernelParams& params);

/// A priori speed field for wave speed c (km/h, nonzero, signed):
///
///   Z_c(x,t) = sum_n phi(x - x_n, t - t_n - (x - x_n)/c) * v_n / N(x,t)
///
/// summed over observed cells, with N(x,t) the matching kernel sum. The wave
/// speed is converted to m/s internally. Cells whose entire neighborhood is
/// cut off (N = 0) take the value of the nearest observation in the scaled
/// distance |dx|/sigma + |dt_shifted|/tau, so the output is always dense.
SpeedField smooth_along_wave(const SpeedField& observed, const ObservationMask& mask,
                             double wave_speed_kmh, const KernelParams& params);

/// One smoothed field per wave speed, order preserved.
struct PrioriBank {
  std::vector<double> wave_speeds;  // km/h, nonzero
  std::vector<SpeedField> fields;   // dense, one per wave speed, shared grid
  KernelParams params;

  Index size() const { return static_cast<Index>(fields.size()); }
  const GridSpec& grid() const { return fields.front().grid; }
};

PrioriBank build_priori_bank(const SpeedField& observed, const ObservationMask& mask,
                             const std::vector<double>& wave_speeds,
                             const KernelParams& params);

/// Table-defaults for the smoothing widths: sigma is half the average
/// inter-detector spacing, tau half the sampling interval.
KernelParams default_kernel_params(const GridSpec& grid, Index detector_count);

}  // namespace tse
