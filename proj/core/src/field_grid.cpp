#include "tse/field_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace tse {

void GridSpec::validate() const {
  if (!(dx > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("grid: dx and dt must be positive");
  }
  if (n_x < 1 || n_t < 1) {
    throw std::invalid_argument("grid: n_x and n_t must be at least 1");
  }
  if (!std::isfinite(x_min) || !std::isfinite(t_min)) {
    throw std::invalid_argument("grid: x_min and t_min must be finite");
  }
}

void SpeedField::validate_shape() const {
  grid.validate();
  if (values.rows() != grid.n_x || values.cols() != grid.n_t) {
    throw std::invalid_argument("speed field shape does not match its grid");
  }
}

void ObservationMask::validate() const {
  grid.validate();
  if (mask.rows() != grid.n_x || mask.cols() != grid.n_t) {
    throw std::invalid_argument("mask shape does not match its grid");
  }
  if (!((mask == 0.0) || (mask == 1.0)).all()) {
    throw std::invalid_argument("mask entries must be 0 or 1");
  }
}

namespace {

// Nearest observed cell in squared index distance; ties go to the smaller
// row, then the smaller column. Scans Chebyshev rings outward and stops once
// no closer cell can exist.
std::pair<Index, Index> nearest_defined_cell(const Matrix& values, Index ci, Index cj) {
  const Index n_x = values.rows();
  const Index n_t = values.cols();
  const Index max_r = std::max(n_x, n_t);

  double best_d2 = std::numeric_limits<double>::infinity();
  Index best_i = -1;
  Index best_j = -1;

  auto consider = [&](Index i, Index j) {
    if (i < 0 || i >= n_x || j < 0 || j >= n_t) return;
    if (!std::isfinite(values(i, j))) return;
    const double di = static_cast<double>(i - ci);
    const double dj = static_cast<double>(j - cj);
    const double d2 = di * di + dj * dj;
    if (d2 < best_d2 || (d2 == best_d2 && std::tie(i, j) < std::tie(best_i, best_j))) {
      best_d2 = d2;
      best_i = i;
      best_j = j;
    }
  };

  for (Index r = 1; r <= max_r; ++r) {
    const double r_min_d2 = static_cast<double>(r) * static_cast<double>(r);
    if (best_i >= 0 && r_min_d2 > best_d2) break;
    for (Index j = cj - r; j <= cj + r; ++j) {
      consider(ci - r, j);
      consider(ci + r, j);
    }
    for (Index i = ci - r + 1; i <= ci + r - 1; ++i) {
      consider(i, cj - r);
      consider(i, cj + r);
    }
  }
  return {best_i, best_j};
}

}  // namespace

AggregationResult aggregate_trajectories(const std::vector<Trajectory>& trajectories,
                                         const GridSpec& grid) {
  grid.validate();
  if (trajectories.empty()) {
    throw std::invalid_argument("no input data");
  }

  struct CellSample {
    Index cell;
    double t, x, v;
    const std::string* vehicle;
  };

  std::vector<CellSample> kept;
  std::size_t skipped = 0;
  for (const Trajectory& traj : trajectories) {
    for (const Trajectory::Sample& s : traj.samples) {
      if (!std::isfinite(s.t) || !std::isfinite(s.x) || !std::isfinite(s.v) || s.v < 0.0) {
        ++skipped;
        continue;
      }
      const double fj = std::floor((s.x - grid.x_min) / grid.dx);
      const double fk = std::floor((s.t - grid.t_min) / grid.dt);
      if (fj < 0.0 || fj >= static_cast<double>(grid.n_x) || fk < 0.0 ||
          fk >= static_cast<double>(grid.n_t)) {
        ++skipped;
        continue;
      }
      const Index j = static_cast<Index>(fj);
      const Index k = static_cast<Index>(fk);
      kept.push_back({j * grid.n_t + k, s.t, s.x, s.v, &traj.vehicle_id});
    }
  }

  // Canonical summation order: by cell, then (t, x, v, vehicle id).
  std::sort(kept.begin(), kept.end(), [](const CellSample& a, const CellSample& b) {
    return std::tie(a.cell, a.t, a.x, a.v, *a.vehicle) <
           std::tie(b.cell, b.t, b.x, b.v, *b.vehicle);
  });

  Matrix values = Matrix::Constant(grid.n_x, grid.n_t, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t lo = 0; lo < kept.size();) {
    std::size_t hi = lo;
    double sum = 0.0;
    while (hi < kept.size() && kept[hi].cell == kept[lo].cell) {
      sum += kept[hi].v;
      ++hi;
    }
    const Index j = kept[lo].cell / grid.n_t;
    const Index k = kept[lo].cell % grid.n_t;
    values(j, k) = sum / static_cast<double>(hi - lo);
    lo = hi;
  }

  if (!values.isFinite().any()) {
    throw std::invalid_argument("no input data: every sample fell outside the grid");
  }

  std::size_t filled = 0;
  const Matrix sampled = values;
  for (Index j = 0; j < grid.n_x; ++j) {
    for (Index k = 0; k < grid.n_t; ++k) {
      if (std::isfinite(sampled(j, k))) continue;
      const auto [ni, nj] = nearest_defined_cell(sampled, j, k);
      values(j, k) = sampled(ni, nj);
      ++filled;
    }
  }

  return {SpeedField{grid, std::move(values)}, skipped, filled};
}

ObservationMask detector_mask(const GridSpec& grid, const std::vector<Index>& detector_rows) {
  grid.validate();
  Matrix mask = Matrix::Zero(grid.n_x, grid.n_t);
  std::vector<Index> seen;
  for (Index row : detector_rows) {
    if (row < 0 || row >= grid.n_x) {
      throw std::invalid_argument("detector row " + std::to_string(row) +
                                  " outside [0, " + std::to_string(grid.n_x) + ")");
    }
    if (std::find(seen.begin(), seen.end(), row) != seen.end()) {
      throw std::invalid_argument("duplicate detector row " + std::to_string(row));
    }
    seen.push_back(row);
    mask.row(row).setOnes();
  }
  return {grid, std::move(mask)};
}

std::vector<Index> equally_spaced_detectors(const GridSpec& grid, Index count) {
  grid.validate();
  if (count < 1 || count > grid.n_x) {
    throw std::invalid_argument("detector count must be in [1, n_x]");
  }
  std::vector<Index> rows;
  for (Index j = 0; j < count; ++j) {
    const double pos = (static_cast<double>(j) + 0.5) * static_cast<double>(grid.n_x) /
                       static_cast<double>(count);
    // Round half down so full coverage (count == n_x) lands on 0..n_x-1.
    Index row = static_cast<Index>(std::ceil(pos - 0.5));
    row = std::clamp<Index>(row, 0, grid.n_x - 1);
    if (rows.empty() || rows.back() != row) {
      rows.push_back(row);
    }
  }
  return rows;
}

SpeedField apply_mask(const SpeedField& field, const ObservationMask& mask) {
  field.validate_shape();
  mask.validate();
  if (!(field.grid == mask.grid)) {
    throw std::invalid_argument("field and mask are on different grids");
  }
  Matrix out = (mask.mask >= 0.5)
                   .select(field.values, std::numeric_limits<double>::quiet_NaN());
  return {field.grid, std::move(out)};
}

SpeedField crop_time(const SpeedField& field, double t_start, double t_end) {
  field.validate_shape();
  if (!(t_end > t_start)) {
    throw std::invalid_argument("time window must have t_end > t_start");
  }
  const GridSpec& g = field.grid;
  const Index k0 = static_cast<Index>(std::ceil((t_start - g.t_min) / g.dt - 1e-9));
  const Index k1 = static_cast<Index>(std::floor((t_end - g.t_min) / g.dt + 1e-9));
  const Index lo = std::clamp<Index>(k0, 0, g.n_t);
  const Index hi = std::clamp<Index>(k1, 0, g.n_t);
  if (hi <= lo) {
    throw std::invalid_argument("time window selects no columns");
  }
  GridSpec out = g;
  out.t_min = g.t_min + static_cast<double>(lo) * g.dt;
  out.n_t = hi - lo;
  return {out, field.values.middleCols(lo, hi - lo)};
}

}  // namespace tse
