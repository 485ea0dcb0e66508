#include "dpstore/noise.hpp"

#include <cmath>
#include <cstdlib>

#include "dpstore/errors.hpp"

namespace dpstore {

void NoiseSpec::validate() const {
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw ParameterError("noise scale must be positive and finite");
  }
  if (distribution == NoiseMode::kTwoSidedGeometric && mean != std::floor(mean)) {
    throw ParameterError("two-sided geometric noise requires an integer mean");
  }
}

double NoiseSpec::draw(RandomStream& rng) const {
  validate();
  switch (distribution) {
    case NoiseMode::kLaplace:
      return sample_laplace(mean, scale, rng);
    case NoiseMode::kTwoSidedGeometric:
      return mean + static_cast<double>(sample_two_sided_geometric(1.0 / scale, rng));
    case NoiseMode::kDisabled:
      return mean;
  }
  return mean;
}

double sample_laplace(double mean, double scale, RandomStream& rng) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw ParameterError("laplace scale must be positive and finite");
  }
  const double u = rng.next_unit() - 0.5;  // (-1/2, 1/2)
  const double mag = std::log1p(-2.0 * std::abs(u));
  return u < 0 ? mean + scale * mag : mean - scale * mag;
}

int64_t sample_two_sided_geometric(double epsilon_over_sensitivity, RandomStream& rng) {
  if (!(epsilon_over_sensitivity > 0) || !std::isfinite(epsilon_over_sensitivity)) {
    throw ParameterError("geometric noise parameter must be positive and finite");
  }
  const double log_alpha = -epsilon_over_sensitivity;
  // Difference of two iid geometrics on {0,1,...} with success 1 - alpha.
  const auto geometric = [&]() -> int64_t {
    const double u = rng.next_unit();
    return static_cast<int64_t>(std::floor(std::log(u) / log_alpha));
  };
  return geometric() - geometric();
}

double two_sided_geometric_pmf(double epsilon_over_sensitivity, int64_t z) {
  const double a = std::exp(-epsilon_over_sensitivity);
  return (1.0 - a) / (1.0 + a) * std::pow(a, static_cast<double>(std::llabs(z)));
}

double centered_noise(NoiseMode mode, double laplace_scale, RandomStream& rng) {
  switch (mode) {
    case NoiseMode::kLaplace:
      return sample_laplace(0.0, laplace_scale, rng);
    case NoiseMode::kTwoSidedGeometric:
      return static_cast<double>(sample_two_sided_geometric(1.0 / laplace_scale, rng));
    case NoiseMode::kDisabled:
      return 0.0;
  }
  return 0.0;
}

}  // namespace dpstore
