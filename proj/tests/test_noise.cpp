#include <doctest.h>

#include <cmath>
#include <map>

#include "dpstore/errors.hpp"
#include "dpstore/noise.hpp"
#include "dpstore/rng.hpp"

#include "test_oracles.hpp"

using namespace dpstore;

TEST_CASE("laplace sampler matches its distribution") {
  RandomStream rng(42);
  const int trials = 100000;

  SUBCASE("zero mean, unit scale: empirical median near 0") {
    std::vector<double> draws(trials);
    for (double& d : draws) d = sample_laplace(0.0, 1.0, rng);
    std::nth_element(draws.begin(), draws.begin() + trials / 2, draws.end());
    CHECK(std::abs(draws[trials / 2]) < 0.02);
  }

  SUBCASE("mean 5, scale 2: half the mass below the mean") {
    int below = 0;
    for (int i = 0; i < trials; ++i) {
      if (sample_laplace(5.0, 2.0, rng) < 5.0) ++below;
    }
    CHECK(std::abs(below / static_cast<double>(trials) - 0.5) < 0.01);
  }

  SUBCASE("mean 0, scale 10: E|X| = scale") {
    double sum_abs = 0.0;
    for (int i = 0; i < trials; ++i) sum_abs += std::abs(sample_laplace(0.0, 10.0, rng));
    CHECK(sum_abs / trials == doctest::Approx(10.0).epsilon(0.02));
  }

  SUBCASE("non-positive scale rejected") {
    CHECK_THROWS_AS(sample_laplace(0.0, 0.0, rng), ParameterError);
    CHECK_THROWS_AS(sample_laplace(0.0, -1.0, rng), ParameterError);
  }

  SUBCASE("deterministic given the seed") {
    RandomStream a(7), b(7);
    for (int i = 0; i < 100; ++i) {
      CHECK(sample_laplace(0.0, 1.0, a) == sample_laplace(0.0, 1.0, b));
    }
  }
}

TEST_CASE("two-sided geometric noise") {
  SUBCASE("p(0) = (1-a)/(1+a), a = 1/2") {
    const double eps = std::log(2.0);
    CHECK(two_sided_geometric_pmf(eps, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(two_sided_geometric_pmf(eps, 0) ==
          doctest::Approx(oracles::geometric_pmf(eps, 0)).epsilon(1e-12));
  }

  SUBCASE("pmf symmetry") {
    for (double eps : {0.1, 0.5, 2.0}) {
      for (int64_t z = 0; z <= 40; ++z) {
        CHECK(two_sided_geometric_pmf(eps, z) == two_sided_geometric_pmf(eps, -z));
      }
    }
  }

  SUBCASE("pmf ratio is exactly e^eps") {
    const double eps = 0.1;
    for (int64_t z = 0; z <= 60; ++z) {
      const double ratio =
          two_sided_geometric_pmf(eps, z) / two_sided_geometric_pmf(eps, z + 1);
      CHECK(ratio == doctest::Approx(std::exp(eps)).epsilon(1e-12));
    }
  }

  SUBCASE("sampler frequencies match the exact pmf") {
    RandomStream rng(3);
    const double eps = 0.7;
    const int trials = 200000;
    std::map<int64_t, int> freq;
    double mean = 0.0;
    for (int i = 0; i < trials; ++i) {
      const int64_t z = sample_two_sided_geometric(eps, rng);
      ++freq[z];
      mean += static_cast<double>(z);
    }
    CHECK(std::abs(mean / trials) < 0.02);
    for (int64_t z = -3; z <= 3; ++z) {
      const double expected = oracles::geometric_pmf(eps, z);
      CHECK(freq[z] / static_cast<double>(trials) ==
            doctest::Approx(expected).epsilon(0.05));
    }
  }

  SUBCASE("parameter checks") {
    RandomStream rng(1);
    CHECK_THROWS_AS(sample_two_sided_geometric(0.0, rng), ParameterError);
    CHECK_THROWS_AS(sample_two_sided_geometric(-0.5, rng), ParameterError);
  }
}

TEST_CASE("noise spec validation") {
  NoiseSpec bad_scale{NoiseMode::kLaplace, 0.0, -1.0};
  CHECK_THROWS_AS(bad_scale.validate(), ParameterError);
  NoiseSpec fractional_geometric{NoiseMode::kTwoSidedGeometric, 0.5, 1.0};
  CHECK_THROWS_AS(fractional_geometric.validate(), ParameterError);
  NoiseSpec ok{NoiseMode::kTwoSidedGeometric, 3.0, 2.0};
  CHECK_NOTHROW(ok.validate());

  RandomStream rng(5);
  NoiseSpec disabled{NoiseMode::kDisabled, 4.5, 1.0};
  CHECK(disabled.draw(rng) == 4.5);
}
