#pragma once

#include "tse/field_grid.hpp"

#include <string>

namespace tse {

/// Binary PPM (P6) heatmap. Row j of pixels (top to bottom) is grid row j,
/// column k is time index k. Speeds are clamped to [0, v_max] and mapped
/// through a fixed red-to-green gradient (low speed red); missing cells are
/// mid gray. v_max <= 0 selects the largest finite value in the field.
struct HeatmapOptions {
  double v_max = 0.0;
};

void write_heatmap_ppm(const std::string& path, const SpeedField& field,
                       const HeatmapOptions& options = {});

}  // namespace tse
