#include "tse/heatmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace tse {

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

// Five-stop gradient, congestion red through yellow to free-flow green.
constexpr std::array<Rgb, 5> kStops = {{
    {165, 0, 38},
    {244, 109, 67},
    {254, 224, 139},
    {166, 217, 106},
    {0, 104, 55},
}};

Rgb colorize(double s) {
  s = std::clamp(s, 0.0, 1.0);
  const double pos = s * static_cast<double>(kStops.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(
      std::min<double>(std::floor(pos), static_cast<double>(kStops.size() - 2)));
  const double f = pos - static_cast<double>(lo);
  const Rgb& a = kStops[lo];
  const Rgb& b = kStops[lo + 1];
  auto mix = [f](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround((1.0 - f) * x + f * y));
  };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

}  // namespace

void write_heatmap_ppm(const std::string& path, const SpeedField& field,
                       const HeatmapOptions& options) {
  field.validate_shape();
  double v_max = options.v_max;
  if (!(v_max > 0.0)) {
    v_max = 0.0;
    for (Index j = 0; j < field.grid.n_x; ++j) {
      for (Index k = 0; k < field.grid.n_t; ++k) {
        const double v = field.values(j, k);
        if (std::isfinite(v)) v_max = std::max(v_max, v);
      }
    }
    if (v_max <= 0.0) v_max = 1.0;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P6\n" << field.grid.n_t << " " << field.grid.n_x << "\n255\n";
  std::string row;
  for (Index j = 0; j < field.grid.n_x; ++j) {
    row.clear();
    for (Index k = 0; k < field.grid.n_t; ++k) {
      const double v = field.values(j, k);
      Rgb px{128, 128, 128};
      if (std::isfinite(v)) px = colorize(v / v_max);
      row.push_back(static_cast<char>(px.r));
      row.push_back(static_cast<char>(px.g));
      row.push_back(static_cast<char>(px.b));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace tse
