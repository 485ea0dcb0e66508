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

// Server layout for point queries. Every domain bin maps to exactly one slot
// group; the plain variant gives each bin its own group, the hashed variant
// keeps heavy bins individual and merges light bins into buckets chosen by
// two-choice hashing.
struct PointPlan {
  enum class Variant { kPlain, kHashed };

  Variant variant = Variant::kPlain;
  uint32_t domain = 1;
  std::vector<uint32_t> bin_group;       // bin (0-based) -> group id
  std::vector<uint64_t> group_released;  // slots per group
  std::vector<uint64_t> group_offset;    // prefix offsets into ds1
  double mu = 0.0;

  // Hashed variant only.
  double theta = 0.0;
  uint32_t light_bins = 0;    // N_l
  uint32_t merge_buckets = 0; // N_b

  uint64_t stored_records() const;
};

struct PointClientIndex {
  PointPlan plan;
  SecretKey key;
  double epsilon = 0.0;
  double beta = 0.0;
  uint64_t n = 0;
  size_t payload_bytes = 0;
  PrivacyBudget budget{Epsilon(1.0)};
};

struct PointSetup {
  PointClientIndex client;
  ServerStore server;
};

// theta <= 0 selects the default 10 * sqrt(2) / epsilon; merge_buckets == 0
// selects the default 20 * sqrt(N_l).
PointPlan plan_point_plain(const Database& db, double epsilon, double beta, NoiseMode mode,
                           RandomStream& rng);
PointPlan plan_point_hashed(const Database& db, double epsilon, double beta, double theta,
                            uint32_t merge_buckets, NoiseMode mode, RandomStream& rng);

PointSetup point_setup_plain(const Database& db, double epsilon, double beta, NoiseMode mode,
                             RandomStream rng);
PointSetup point_setup_hashed(const Database& db, double epsilon, double beta, double theta,
                              uint32_t merge_buckets, NoiseMode mode, RandomStream rng);

// Fetches the slot group holding bin `a` and returns exactly the records with
// key a.
std::vector<KeyedRecord> point_query(const PointClientIndex& index, ServerStore& store,
                                     uint32_t a);

uint64_t point_query_mprime(const PointPlan& plan, uint32_t a);

}  // namespace dpstore
