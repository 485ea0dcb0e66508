#pragma once

#include <cstdint>

#include "dpstore/rng.hpp"

namespace dpstore {

// How a sanitizer perturbs counts.
//   kLaplace           - production mode, real-valued noise.
//   kTwoSidedGeometric - integer noise with the same e^eps ratio guarantee;
//                        its pmf can be enumerated exactly, which is what the
//                        exact-DP verification tests rely on.
//   kDisabled          - test hook: noise is identically zero (offsets still
//                        apply).
enum class NoiseMode { kLaplace, kTwoSidedGeometric, kDisabled };

struct NoiseSpec {
  NoiseMode distribution = NoiseMode::kLaplace;
  double mean = 0.0;
  double scale = 1.0;  // lambda = sensitivity / epsilon

  // Throws ParameterError if scale <= 0 or a geometric spec has a
  // non-integer mean.
  void validate() const;

  double draw(RandomStream& rng) const;
};

// One draw from Laplace(mean, scale). Deterministic given the stream state.
double sample_laplace(double mean, double scale, RandomStream& rng);

// Two-sided geometric noise: integer Z with
//   p(z) = ((1 - a) / (1 + a)) * a^|z|,  a = exp(-epsilon_over_sensitivity).
int64_t sample_two_sided_geometric(double epsilon_over_sensitivity, RandomStream& rng);

// Exact pmf of the two-sided geometric distribution, for test oracles and the
// DP enumeration checks.
double two_sided_geometric_pmf(double epsilon_over_sensitivity, int64_t z);

// Centered noise of the given Laplace scale under `mode` (geometric mode maps
// scale lambda to parameter 1/lambda; disabled mode returns 0).
double centered_noise(NoiseMode mode, double laplace_scale, RandomStream& rng);

}  // namespace dpstore
