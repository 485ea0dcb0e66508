#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dpstore/record.hpp"
#include "dpstore/rng.hpp"

namespace oracles {

// Brute-force plaintext filter: the definition of a query answer.
inline std::vector<dpstore::KeyedRecord> scan(const dpstore::Database& db,
                                              const dpstore::Query& q) {
  std::vector<dpstore::KeyedRecord> out;
  for (const dpstore::KeyedRecord& r : db.records) {
    if (dpstore::matches(q, r)) out.push_back(r);
  }
  return out;
}

// Canonical form for answer comparison (multiset equality).
inline std::vector<std::tuple<uint32_t, uint32_t, std::vector<uint8_t>>> canonical(
    std::vector<dpstore::KeyedRecord> records) {
  std::vector<std::tuple<uint32_t, uint32_t, std::vector<uint8_t>>> out;
  out.reserve(records.size());
  for (dpstore::KeyedRecord& r : records) {
    out.emplace_back(r.key, r.bits, std::move(r.payload));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Closed-form inversion of (1 - 1/2 e^{-mu/scale})^draws >= 1 - beta.
inline double min_offset_closed_form(uint64_t draws, double scale, double beta) {
  const double root = std::pow(1.0 - beta, 1.0 / static_cast<double>(draws));
  const double mu = scale * std::log(1.0 / (2.0 * (1.0 - root)));
  return std::max(0.0, mu);
}

// Exact two-sided geometric pmf, independent of the library sampler.
inline double geometric_pmf(double eps, int64_t z) {
  const double a = std::exp(-eps);
  return (1.0 - a) / (1.0 + a) * std::pow(a, static_cast<double>(z < 0 ? -z : z));
}

inline dpstore::Database random_database(dpstore::RandomStream& rng, uint32_t max_domain,
                                         uint64_t max_records, uint32_t attr_bits = 0,
                                         size_t payload_bytes = 16) {
  dpstore::Database db;
  db.domain_size = 2 + static_cast<uint32_t>(rng.next_below(std::max(1u, max_domain - 1)));
  db.attribute_bits = attr_bits;
  db.payload_bytes = payload_bytes;
  const uint64_t n = rng.next_below(max_records + 1);
  for (uint64_t i = 0; i < n; ++i) {
    dpstore::KeyedRecord r;
    r.key = 1 + static_cast<uint32_t>(rng.next_below(db.domain_size));
    r.bits = attr_bits == 0 ? 0
                            : static_cast<uint32_t>(rng.next_u64() & ((1ull << attr_bits) - 1));
    r.payload.resize(payload_bytes);
    for (size_t j = 0; j < payload_bytes; ++j) {
      r.payload[j] = static_cast<uint8_t>(rng.next_u64());
    }
    db.records.push_back(std::move(r));
  }
  return db;
}

}  // namespace oracles
