#pragma once

#include <cstdint>
#include <vector>

namespace dpstore {

// One database record: an ordered search key in [1, N], a k-bit attribute
// vector (bit i of `bits` is attribute i+1), and a fixed-length payload.
struct KeyedRecord {
  uint32_t key = 0;
  uint32_t bits = 0;
  std::vector<uint8_t> payload;
};

struct Database {
  uint32_t domain_size = 1;   // N, ordered keys live in [1, N]
  uint32_t attribute_bits = 0;  // k, 0 if attribute queries are not used
  size_t payload_bytes = 64;  // kappa
  std::vector<KeyedRecord> records;

  size_t size() const { return records.size(); }
};

enum class QueryType { kPoint, kRange, kAttribute };

struct Query {
  QueryType type = QueryType::kPoint;
  uint32_t lo = 1;  // point value, or range [lo, hi]
  uint32_t hi = 1;
  uint32_t attribute = 1;  // 1-based attribute index
  bool bit = false;

  static Query point(uint32_t a) { return {QueryType::kPoint, a, a, 1, false}; }
  static Query range(uint32_t a, uint32_t b) { return {QueryType::kRange, a, b, 1, false}; }
  static Query attribute_eq(uint32_t i, bool b) { return {QueryType::kAttribute, 1, 1, i, b}; }
};

// The query predicate itself; systems and oracles share this definition.
inline bool matches(const Query& q, const KeyedRecord& r) {
  switch (q.type) {
    case QueryType::kPoint:
      return r.key == q.lo;
    case QueryType::kRange:
      return q.lo <= r.key && r.key <= q.hi;
    case QueryType::kAttribute:
      return (((r.bits >> (q.attribute - 1)) & 1u) != 0) == q.bit;
  }
  return false;
}

// Per-bin counts over [1, N]; bin i is stored at index i - 1.
using Histogram = std::vector<uint64_t>;

Histogram histogram_of(const Database& db);

}  // namespace dpstore
