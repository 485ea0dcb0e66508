#pragma once

#include <cstdint>

namespace dpstore {

// A positivity offset: with probability >= 1 - beta, `draws` independent
// Laplace(mu, scale) samples are all positive.
struct OffsetSolution {
  double mu = 0.0;
  uint64_t draws = 1;
  double beta = 0.0;
};

// Minimal mu (to 1e-6 absolute, never negative) with
//   (1 - 1/2 exp(-mu/scale))^draws >= 1 - beta.
OffsetSolution solve_min_offset(uint64_t draws, double scale, double beta);

// Union bound on the probability that some bucket of a k-ary-tree-derived
// bucketization overflows its capacity slack mu: for i = 0 .. 2(arity-1)h - 1
// it sums P[Binom(nodes, p_i) >= i+1] with p_i = 1/2 exp(-mu eps / (h (i+1))),
// h = height of the tree over `domain` padded to a power of `arity`, and
// `nodes` the total tree node count. Evaluated in log-space (binomial
// coefficients via lgamma).
double bucket_overflow_bound(double mu, double epsilon, uint32_t arity, uint64_t domain);

// Minimal integer mu_b with bucket_overflow_bound(mu_b) <= beta. `n` and
// `buckets` are validated but do not enter the bound; the slack is additive
// on top of ceil(n/buckets).
OffsetSolution solve_bucket_offset(uint64_t n, uint32_t buckets, uint32_t arity,
                                   uint64_t domain, double epsilon, double beta);

}  // namespace dpstore
