#include "tse/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tse {

double GaussianSampler::next() {
  if (has_spare) {
    has_spare = false;
    return spare;
  }
  const double u1 = 1.0 - rng.next_unit();  // (0, 1]
  const double u2 = rng.next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare = r * std::sin(angle);
  has_spare = true;
  return r * std::cos(angle);
}

void SyntheticSpec::validate() const {
  grid.validate();
  if (!(free_speed > congested_speed) || !(congested_speed >= 0.0)) {
    throw std::invalid_argument("synthetic spec: need free_speed > congested_speed >= 0");
  }
  if (!(noise_std >= 0.0)) {
    throw std::invalid_argument("synthetic spec: noise_std must be nonnegative");
  }
  for (const WaveBand& band : bands) {
    if (!(band.half_width > 0.0)) {
      throw std::invalid_argument("synthetic spec: band half_width must be positive");
    }
    if (band.speed_kmh == 0.0) {
      throw std::invalid_argument("synthetic spec: band speed must be nonzero");
    }
  }
}

SpeedField generate_field(const SyntheticSpec& spec) {
  spec.validate();
  const GridSpec& g = spec.grid;
  Matrix values(g.n_x, g.n_t);
  for (Index j = 0; j < g.n_x; ++j) {
    const double x = g.cell_x(j);
    for (Index k = 0; k < g.n_t; ++k) {
      const double t = g.cell_t(k);
      bool congested = false;
      for (const WaveBand& band : spec.bands) {
        const double band_x = band.start_x + band.speed_kmh / 3.6 * (t - band.start_t);
        if (std::abs(x - band_x) <= band.half_width) {
          congested = true;
          break;
        }
      }
      values(j, k) = congested ? spec.congested_speed : spec.free_speed;
    }
  }
  if (spec.noise_std > 0.0) {
    GaussianSampler gauss(spec.seed);
    for (Index j = 0; j < g.n_x; ++j) {
      for (Index k = 0; k < g.n_t; ++k) {
        values(j, k) = std::max(0.0, values(j, k) + spec.noise_std * gauss.next());
      }
    }
  }
  return {g, std::move(values)};
}

WeightBank brute_force_weights(const SpeedField& observed, const ObservationMask& mask,
                               const PrioriBank& bank) {
  if (bank.size() != 2) {
    throw std::invalid_argument("brute-force weights are defined for exactly two fields");
  }
  observed.validate_shape();
  mask.validate();
  if (!(observed.grid == mask.grid) || !(observed.grid == bank.grid())) {
    throw std::invalid_argument("inputs are on different grids");
  }

  const Matrix& z1 = bank.fields[0].values;
  const Matrix& z2 = bank.fields[1].values;
  const GridSpec& g = observed.grid;

  Matrix w1(g.n_x, g.n_t);
  for (Index j = 0; j < g.n_x; ++j) {
    for (Index k = 0; k < g.n_t; ++k) {
      const bool obs = mask.mask(j, k) >= 0.5 && std::isfinite(observed.values(j, k));
      const double d = z1(j, k) - z2(j, k);
      if (!obs || d == 0.0) {
        w1(j, k) = 0.5;
      } else {
        w1(j, k) = (observed.values(j, k) - z2(j, k)) / d;
      }
    }
  }
  WeightBank out;
  out.weights.push_back(w1);
  out.weights.push_back(1.0 - w1);
  return out;
}

}  // namespace tse
