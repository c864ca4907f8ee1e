#pragma once

#include "tse/field_grid.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tse {

// Native field format: one header line "n_x n_t dx dt x_min t_min", then
// n_x lines of n_t space-separated values; missing cells are written as
// "nan". The mask format shares the layout with 0/1 entries.

/// Shortest round-trip decimal form (std::to_chars); NaN prints as "nan".
std::string format_number(double v);

SpeedField read_field(const std::string& path);
void write_field(const std::string& path, const SpeedField& field);
void write_field(std::ostream& out, const SpeedField& field);

ObservationMask read_mask(const std::string& path);
void write_mask(const std::string& path, const ObservationMask& mask);

enum class TrajectoryFormat {
  native,  // header: vehicle_id time_s position_m speed_kmh
  ngsim,   // NGSIM column names; feet -> m, ft/s -> km/h, ms -> s
};

struct TrajectoryReadOptions {
  TrajectoryFormat format = TrajectoryFormat::native;
  std::optional<int> lane;  // ngsim only: keep rows with this Lane_ID
};

struct TrajectoryReadResult {
  std::vector<Trajectory> trajectories;
  std::size_t dropped_duplicates = 0;  // repeated (vehicle, t) rows
};

/// Parses a delimited trajectory file (commas, tabs or spaces). Malformed
/// rows raise std::invalid_argument naming the 1-based line number.
TrajectoryReadResult read_trajectories(const std::string& path,
                                       const TrajectoryReadOptions& options = {});

}  // namespace tse
