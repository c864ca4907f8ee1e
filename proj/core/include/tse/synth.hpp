#pragma once

#include "tse/admm.hpp"
#include "tse/field_grid.hpp"

#include <cstdint>
#include <vector>

namespace tse {

/// splitmix64: x += 0x9E3779B97F4A7C15; z = x; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
/// z = (z ^ z>>27) * 0x94D049BB133111EB; return z ^ z>>31. Uniform doubles take
/// the top 53 bits. Stated explicitly so generated fields can be reproduced
/// outside this codebase.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0, 1)
};

/// Standard normals by Box-Muller on splitmix64 uniforms: with u1 in (0,1],
/// u2 in [0,1), r = sqrt(-2 ln u1), the pair is (r cos(2 pi u2), r sin(2 pi u2)),
/// consumed cos-first.
struct GaussianSampler {
  SplitMix64 rng;
  bool has_spare = false;
  double spare = 0.0;

  explicit GaussianSampler(std::uint64_t seed) : rng(seed) {}
  double next();
};

/// Congestion band propagating at a signed wave speed: the set of points
/// within half_width (in x) of the line x = start_x + speed/3.6 * (t - start_t).
struct WaveBand {
  double start_x = 0.0;      // m
  double start_t = 0.0;      // s
  double speed_kmh = -15.0;  // signed
  double half_width = 10.0;  // m
};

struct SyntheticSpec {
  GridSpec grid;
  double free_speed = 80.0;       // km/h
  double congested_speed = 20.0;  // km/h
  std::vector<WaveBand> bands;
  double noise_std = 0.0;  // km/h
  std::uint64_t seed = 0;

  void validate() const;
};

/// Two-valued field with the given wave bands plus optional zero-mean Gaussian
/// noise (row-major cell order), clamped at 0. Deterministic for a fixed seed.
SpeedField generate_field(const SyntheticSpec& spec);

/// Exact minimizer of the m=2 weight problem. The masked misfit carries no
/// cross-cell terms, so it decouples into one scalar quadratic per observed
/// cell: minimizing (w z1 + (1-w) z2 - z)^2 gives w = (z - z2)/(z1 - z2) when
/// z1 != z2, and any w (we pick 1/2) when z1 = z2. Unobserved cells do not
/// appear in the objective and also get w = 1/2. Serves as the independent
/// optimality oracle for the ADMM solver.
WeightBank brute_force_weights(const SpeedField& observed, const ObservationMask& mask,
                               const PrioriBank& bank);

}  // namespace tse
