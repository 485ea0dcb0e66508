#pragma once

#include <cstdint>
#include <string_view>

namespace dpstore {

// Counter-based splittable random stream (splitmix64 core). Every component
// of a protocol run derives its own child stream from one root seed, so a
// whole run is reproducible from a single integer no matter how the
// components interleave their draws. Each thread must own its own stream.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc908ull)), counter_(0) {}

  uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

  // Uniform double in the open interval (0, 1).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform in [0, n). n must be positive.
  uint64_t next_below(uint64_t n) {
    const uint64_t limit = n * (UINT64_MAX / n);
    uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  // Child streams are keyed by (parent key, label); drawing from a child
  // never advances the parent and vice versa.
  RandomStream split(std::string_view label) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : label) h = (h ^ static_cast<uint8_t>(c)) * 0x100000001b3ull;
    return RandomStream(mix(key_ ^ mix(h)));
  }

  RandomStream split(uint64_t index) const {
    return RandomStream(mix(key_ ^ mix(index + 0x94d049bb133111ebull)));
  }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  uint64_t key_;
  uint64_t counter_;
};

}  // namespace dpstore
