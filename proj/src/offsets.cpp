#include "dpstore/offsets.hpp"

#include <cmath>

#include "dpstore/errors.hpp"
#include "dpstore/kary.hpp"

namespace dpstore {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw ParameterError("beta must lie in (0, 1)");
  }
}

// log P[all `draws` samples of Laplace(mu, scale) are positive].
double log_all_positive(double mu, uint64_t draws, double scale) {
  return static_cast<double>(draws) * std::log1p(-0.5 * std::exp(-mu / scale));
}

// P[Binom(n, p) >= m] for small m, via 1 - CDF(m-1) with log-space terms.
double binom_tail_ge(uint64_t n, double p, uint64_t m) {
  if (m == 0) return 1.0;
  if (m > n) return 0.0;
  if (p <= 0.0) return 0.0;
  const double logp = std::log(p);
  const double log1mp = std::log1p(-p);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  double cdf = 0.0;
  for (uint64_t k = 0; k < m; ++k) {
    const double kk = static_cast<double>(k);
    const double log_term = lgn - std::lgamma(kk + 1.0) -
                            std::lgamma(static_cast<double>(n - k) + 1.0) +
                            kk * logp + static_cast<double>(n - k) * log1mp;
    cdf += std::exp(log_term);
  }
  return cdf >= 1.0 ? 0.0 : 1.0 - cdf;
}

}  // namespace

OffsetSolution solve_min_offset(uint64_t draws, double scale, double beta) {
  if (draws < 1) throw ParameterError("draws must be at least 1");
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw ParameterError("scale must be positive and finite");
  }
  check_beta(beta);

  const double target = std::log1p(-beta);
  const auto holds = [&](double mu) { return log_all_positive(mu, draws, scale) >= target; };

  if (holds(0.0)) return {0.0, draws, beta};
  double lo = 0.0, hi = scale;
  while (!holds(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return {hi, draws, beta};
}

double bucket_overflow_bound(double mu, double epsilon, uint32_t arity, uint64_t domain) {
  const KaryShape shape = KaryShape::over(domain, arity);
  const double lambda = static_cast<double>(shape.height) / epsilon;
  const uint64_t terms = 2ull * (arity - 1) * shape.height;
  double total = 0.0;
  for (uint64_t i = 0; i < terms; ++i) {
    const double p = 0.5 * std::exp(-mu / (lambda * static_cast<double>(i + 1)));
    total += binom_tail_ge(shape.node_count, p, i + 1);
  }
  return total;
}

OffsetSolution solve_bucket_offset(uint64_t n, uint32_t buckets, uint32_t arity,
                                   uint64_t domain, double epsilon, double beta) {
  (void)n;
  if (buckets < 1) throw ParameterError("bucket count must be at least 1");
  if (arity < 2) throw ParameterError("tree arity must be at least 2");
  if (domain < 2) throw ParameterError("domain must be at least 2");
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be positive and finite");
  }
  check_beta(beta);

  const KaryShape shape = KaryShape::over(domain, arity);
  const auto holds = [&](uint64_t mu) {
    return bucket_overflow_bound(static_cast<double>(mu), epsilon, arity, domain) <= beta;
  };

  if (holds(0)) return {0.0, shape.node_count, beta};
  uint64_t lo = 0, hi = 1;
  while (!holds(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const uint64_t mid = lo + (hi - lo) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  return {static_cast<double>(hi), shape.node_count, beta};
}

}  // namespace dpstore
