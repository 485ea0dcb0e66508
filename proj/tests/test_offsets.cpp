#include <doctest.h>

#include <cmath>

#include "dpstore/errors.hpp"
#include "dpstore/kary.hpp"
#include "dpstore/noise.hpp"
#include "dpstore/offsets.hpp"
#include "dpstore/rng.hpp"

#include "test_oracles.hpp"

using namespace dpstore;

namespace {
const double kBeta20 = std::pow(2.0, -20.0);
}

TEST_CASE("solve_min_offset against the closed form") {
  SUBCASE("single draw at epsilon 0.1") {
    const OffsetSolution sol = solve_min_offset(1, 10.0, kBeta20);
    CHECK(sol.mu > 131.6);
    CHECK(sol.mu < 131.8);
    CHECK(sol.mu == doctest::Approx(10.0 * std::log(std::pow(2.0, 19.0))).epsilon(1e-6));
    CHECK(sol.mu == doctest::Approx(oracles::min_offset_closed_form(1, 10.0, kBeta20))
                        .epsilon(1e-6));
  }

  SUBCASE("full-domain draws match the experiment parameters") {
    const OffsetSolution sol = solve_min_offset(7578, 10.0, kBeta20);
    CHECK(std::abs(sol.mu - 221.0) < 1.0);
    CHECK(sol.mu ==
          doctest::Approx(oracles::min_offset_closed_form(7578, 10.0, kBeta20)).epsilon(1e-6));
  }

  SUBCASE("beta near one asks for no guarantee") {
    CHECK(solve_min_offset(1, 10.0, 0.9999999).mu == 0.0);
    CHECK(solve_min_offset(100, 5.0, 0.999999999).mu == 0.0);
  }

  SUBCASE("random instances agree with the closed form") {
    RandomStream rng(11);
    for (int i = 0; i < 50; ++i) {
      const uint64_t draws = 1 + rng.next_below(10000);
      const double scale = 0.1 + 20.0 * rng.next_unit();
      const double beta = std::pow(2.0, -1.0 - static_cast<double>(rng.next_below(30)));
      const double expected = oracles::min_offset_closed_form(draws, scale, beta);
      CHECK(solve_min_offset(draws, scale, beta).mu ==
            doctest::Approx(expected).epsilon(1e-6).scale(1.0));
    }
  }

  SUBCASE("monotone in draws and scale, antitone in beta") {
    RandomStream rng(12);
    for (int i = 0; i < 40; ++i) {
      const uint64_t draws = 1 + rng.next_below(500);
      const double scale = 0.5 + 5.0 * rng.next_unit();
      const double beta = 0.001 + 0.4 * rng.next_unit();
      const double base = solve_min_offset(draws, scale, beta).mu;
      CHECK(solve_min_offset(draws + 1 + rng.next_below(100), scale, beta).mu >= base - 1e-9);
      CHECK(solve_min_offset(draws, scale * 1.5, beta).mu >= base - 1e-9);
      CHECK(solve_min_offset(draws, scale, std::min(0.99, beta * 2)).mu <= base + 1e-9);
    }
  }

  SUBCASE("positivity holds by Monte Carlo") {
    RandomStream rng(13);
    const uint64_t draws = 5;
    const double scale = 2.0;
    const double beta = 0.01;
    const OffsetSolution sol = solve_min_offset(draws, scale, beta);
    const int trials = 1000000;
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
      for (uint64_t d = 0; d < draws; ++d) {
        if (sample_laplace(sol.mu, scale, rng) <= 0.0) {
          ++failures;
          break;
        }
      }
    }
    CHECK(failures <= static_cast<int>(2 * beta * trials));
  }

  SUBCASE("parameter checks") {
    CHECK_THROWS_AS(solve_min_offset(0, 1.0, 0.5), ParameterError);
    CHECK_THROWS_AS(solve_min_offset(1, 0.0, 0.5), ParameterError);
    CHECK_THROWS_AS(solve_min_offset(1, 1.0, 0.0), ParameterError);
    CHECK_THROWS_AS(solve_min_offset(1, 1.0, 1.0), ParameterError);
  }
}

TEST_CASE("k-ary tree geometry is counted by construction") {
  CHECK(KaryShape::over(4, 2).node_count == 7);  // 1 + 2 + 4
  CHECK(KaryShape::over(8, 2).node_count == 15);
  CHECK(KaryShape::over(5, 2).padded_domain == 8);
  CHECK(KaryShape::over(7578, 16).padded_domain == 65536);
  CHECK(KaryShape::over(7578, 16).height == 4);
  CHECK(KaryShape::over(7578, 16).node_count == 1 + 16 + 256 + 4096 + 65536);
}

TEST_CASE("solve_bucket_offset") {
  SUBCASE("beta near one asks for nothing") {
    CHECK(solve_bucket_offset(100, 4, 2, 16, 0.5, 0.99999999).mu == 0.0);
  }

  SUBCASE("minimal: holds at mu_b, fails at mu_b - 1") {
    for (auto [arity, domain, eps] : {std::tuple<uint32_t, uint64_t, double>{2, 64, 0.5},
                                      {16, 256, 1.0},
                                      {4, 100, 0.2}}) {
      const OffsetSolution sol = solve_bucket_offset(1000, 8, arity, domain, eps, kBeta20);
      const uint64_t mu = static_cast<uint64_t>(sol.mu);
      CHECK(bucket_overflow_bound(static_cast<double>(mu), eps, arity, domain) <= kBeta20);
      REQUIRE(mu >= 1);
      CHECK(bucket_overflow_bound(static_cast<double>(mu - 1), eps, arity, domain) > kBeta20);
    }
  }

  SUBCASE("a union over at least one draw needs at least the one-draw offset") {
    const OffsetSolution sol = solve_bucket_offset(1048575, 52, 16, 7578, 0.1, kBeta20);
    CHECK(sol.mu > 0.0);
    CHECK(std::isfinite(sol.mu));
    const double single = solve_min_offset(1, std::log(7578.0) / std::log(16.0) / 0.1,
                                           kBeta20).mu;
    CHECK(sol.mu >= single);
  }

  SUBCASE("parameter checks") {
    CHECK_THROWS_AS(solve_bucket_offset(10, 0, 2, 16, 0.5, 0.5), ParameterError);
    CHECK_THROWS_AS(solve_bucket_offset(10, 2, 1, 16, 0.5, 0.5), ParameterError);
    CHECK_THROWS_AS(solve_bucket_offset(10, 2, 2, 1, 0.5, 0.5), ParameterError);
    CHECK_THROWS_AS(solve_bucket_offset(10, 2, 2, 16, 0.0, 0.5), ParameterError);
  }
}
