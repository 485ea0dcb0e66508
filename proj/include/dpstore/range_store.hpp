#pragma once

#include <cstdint>
#include <vector>

#include "dpstore/budget.hpp"
#include "dpstore/cipher.hpp"
#include "dpstore/noise.hpp"
#include "dpstore/record.hpp"
#include "dpstore/rng.hpp"
#include "dpstore/server_store.hpp"

namespace dpstore {

// Bucketized layout for range queries: b buckets over [1, N] whose borders
// come from a noisy cumulative histogram, each padded to a fixed capacity of
// ceil(n/b) + mu_b records. Bucket j (0-based) occupies ds1 slots
// [j * capacity, (j+1) * capacity).
struct BucketPlan {
  uint32_t buckets = 1;
  std::vector<uint32_t> borders;  // b+1 entries; borders[0] = 0, borders[b] = N;
                                  // bucket j covers [borders[j]+1, borders[j+1]]
  uint64_t capacity = 0;
  uint64_t mu_b = 0;

  uint64_t stored_records() const { return static_cast<uint64_t>(buckets) * capacity; }
  // 0-based ids of buckets whose range intersects [lo, hi].
  std::vector<uint32_t> intersecting(uint32_t lo, uint32_t hi) const;
};

struct RangeClientIndex {
  BucketPlan plan;
  SecretKey key;
  double epsilon = 0.0;
  double beta = 0.0;
  uint64_t n = 0;
  size_t payload_bytes = 0;
  PrivacyBudget budget{Epsilon(1.0)};
};

struct RangeSetup {
  RangeClientIndex client;
  ServerStore server;
};

// Border placement and capacity check without materializing ciphertexts
// (used by count-only benchmark runs). Throws BucketOverflowError if some
// bucket's true count exceeds the capacity (probability <= beta).
BucketPlan plan_range_buckets(const Database& db, uint32_t buckets, uint32_t tree_arity,
                              double epsilon, double beta, NoiseMode mode, RandomStream& rng);

RangeSetup range_setup(const Database& db, uint32_t buckets, uint32_t tree_arity,
                       double epsilon, double beta, NoiseMode mode, RandomStream rng);

// Fetches every bucket intersecting [lo, hi], discards dummies and
// out-of-range records, and returns exactly the true result set.
std::vector<KeyedRecord> range_query(const RangeClientIndex& index, ServerStore& store,
                                     uint32_t lo, uint32_t hi);

// Records the server would return for [lo, hi]; pure function of the plan.
uint64_t range_query_mprime(const BucketPlan& plan, uint32_t lo, uint32_t hi);

}  // namespace dpstore
