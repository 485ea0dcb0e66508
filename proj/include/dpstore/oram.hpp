#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dpstore/cipher.hpp"
#include "dpstore/rng.hpp"
#include "dpstore/trace.hpp"

namespace dpstore {

enum class OramEngine { kPathOram, kLinearScan };
enum class OramOp { kRead, kWrite };

// Server-side storage: a complete binary tree of buckets for Path ORAM
// (levels = L+1, bucket_size = Z), or a flat slot array for the linear-scan
// engine. Every slot always holds a valid ciphertext; the shape never changes
// after init.
struct OramServerTree {
  uint32_t levels = 1;
  uint32_t bucket_size = 1;
  std::vector<Ciphertext> slots;  // bucket-major
  LeakageTrace trace;

  uint64_t bucket_count() const { return slots.size() / bucket_size; }
};

// Client state: secret key, position map, and stash. One outstanding access
// at a time; the protocol driver owns this object.
class OramClient {
 public:
  static std::pair<OramClient, OramServerTree> init(OramEngine engine, uint64_t capacity,
                                                    size_t payload_bytes, uint32_t bucket_size,
                                                    RandomStream rng,
                                                    size_t max_stash = 1024);

  // Reads or writes one logical address. Path ORAM reads the full path for
  // the address's leaf, remaps the address uniformly, evicts the stash
  // greedily along the path, and writes the re-encrypted path back; reads and
  // writes are indistinguishable to the server. Returns the (previous) block
  // payload; an address never written reads as all zeros.
  std::vector<uint8_t> access(OramServerTree& server, OramOp op, uint64_t addr,
                              const std::vector<uint8_t>* data);

  std::vector<uint8_t> read(OramServerTree& server, uint64_t addr) {
    return access(server, OramOp::kRead, addr, nullptr);
  }
  void write(OramServerTree& server, uint64_t addr, const std::vector<uint8_t>& data) {
    access(server, OramOp::kWrite, addr, &data);
  }

  OramEngine engine() const { return engine_; }
  uint64_t capacity() const { return capacity_; }
  size_t payload_bytes() const { return payload_bytes_; }
  uint64_t leaf_count() const { return 1ull << height_; }
  uint32_t path_length() const { return height_ + 1; }
  size_t stash_size() const { return stash_.size(); }
  uint64_t position_of(uint64_t addr) const { return position_[addr]; }

  // Test hook: where every live block currently sits (bucket index, or
  // nullopt for the stash). Decrypts the server state.
  std::vector<std::pair<uint64_t, std::optional<uint64_t>>> dump_blocks(
      const OramServerTree& server) const;

  // Default-constructed clients are empty shells; use init().
  OramClient() = default;

 private:
  std::vector<uint64_t> path_buckets(uint64_t leaf) const;
  Ciphertext encrypt_block(bool valid, uint64_t addr, const std::vector<uint8_t>& payload);
  std::vector<uint8_t> linear_access(OramServerTree& server, OramOp op, uint64_t addr,
                                     const std::vector<uint8_t>* data);

  OramEngine engine_ = OramEngine::kPathOram;
  uint64_t capacity_ = 1;
  size_t payload_bytes_ = 0;
  uint32_t bucket_size_ = 4;
  uint32_t height_ = 0;  // L; tree has 2^(L+1) - 1 buckets
  size_t max_stash_ = 1024;
  SecretKey key_;
  RandomStream remap_rng_{0};
  RandomStream crypto_rng_{0};
  std::vector<uint64_t> position_;
  std::map<uint64_t, std::vector<uint8_t>> stash_;
};

}  // namespace dpstore
