#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace tse {

// Space is the row dimension, time the column dimension, everywhere.
using Matrix = Eigen::ArrayXXd;
using Index = Eigen::Index;

/// Uniform space-time grid. Cell (j,k) covers the half-open box
/// [x_min + j*dx, x_min + (j+1)*dx) x [t_min + k*dt, t_min + (k+1)*dt).
struct GridSpec {
  double x_min = 0.0;  // m
  double t_min = 0.0;  // s
  double dx = 1.0;     // m
  double dt = 1.0;     // s
  Index n_x = 0;
  Index n_t = 0;

  double cell_x(Index j) const { return x_min + (static_cast<double>(j) + 0.5) * dx; }
  double cell_t(Index k) const { return t_min + (static_cast<double>(k) + 0.5) * dt; }
  double x_extent() const { return static_cast<double>(n_x) * dx; }
  double t_extent() const { return static_cast<double>(n_t) * dt; }
  Index cell_count() const { return n_x * n_t; }

  void validate() const;  // throws std::invalid_argument on a malformed grid

  bool operator==(const GridSpec&) const = default;
};

/// Speed field on a grid, km/h. Cells with no defining data are NaN;
/// NaN means "missing", which is distinct from a measured zero speed.
struct SpeedField {
  GridSpec grid;
  Matrix values;  // n_x rows, n_t columns

  bool dense() const { return values.isFinite().all(); }
  Index missing_count() const { return grid.cell_count() - values.isFinite().count(); }
  void validate_shape() const;
};

/// Binary mask of observed cells (the operator P_Omega).
struct ObservationMask {
  GridSpec grid;
  Matrix mask;  // entries 0 or 1

  Index observed_count() const { return static_cast<Index>((mask >= 0.5).count()); }
  void validate() const;
};

/// One vehicle's measurement tuples (t, x, v), strictly increasing in t.
struct Trajectory {
  struct Sample {
    double t = 0.0;  // s
    double x = 0.0;  // m
    double v = 0.0;  // km/h
  };
  std::string vehicle_id;
  std::vector<Sample> samples;
};

struct AggregationResult {
  SpeedField field;
  std::size_t skipped_samples = 0;  // fell outside the grid extent or had v < 0
  std::size_t filled_cells = 0;     // had no samples; filled from nearest cell
};

/// Cell-mean aggregation of trajectory samples followed by nearest-cell fill,
/// so the returned field is dense. Contributions to a cell are summed in a
/// canonical order (sorted by t, x, v, vehicle id), which makes the result
/// bit-identical under any permutation of the input list.
AggregationResult aggregate_trajectories(const std::vector<Trajectory>& trajectories,
                                         const GridSpec& grid);

/// Mask observing every column of each listed row (stationary detectors).
ObservationMask detector_mask(const GridSpec& grid, const std::vector<Index>& detector_rows);

/// Deterministic equally spaced detector placement: row j of `count` sits at
/// (j + 0.5) * n_x / count, rounded half down, clamped and deduplicated.
std::vector<Index> equally_spaced_detectors(const GridSpec& grid, Index count);

/// Keep observed cells, mark everything else missing.
SpeedField apply_mask(const SpeedField& field, const ObservationMask& mask);

/// Restrict a field to columns whose cells start inside [t_start, t_end).
SpeedField crop_time(const SpeedField& field, double t_start, double t_end);

}  // namespace tse
