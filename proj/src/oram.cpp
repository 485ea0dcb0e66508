#include "dpstore/oram.hpp"

#include <cstring>

#include "dpstore/errors.hpp"

namespace dpstore {

namespace {

// Block plaintext: [valid u8][addr u64][payload].
std::vector<uint8_t> serialize_block(bool valid, uint64_t addr,
                                     const std::vector<uint8_t>& payload) {
  std::vector<uint8_t> out(9 + payload.size());
  out[0] = valid ? 1 : 0;
  std::memcpy(out.data() + 1, &addr, 8);
  std::memcpy(out.data() + 9, payload.data(), payload.size());
  return out;
}

struct Block {
  bool valid = false;
  uint64_t addr = 0;
  std::vector<uint8_t> payload;
};

Block parse_block(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 9) throw ProtocolError("bad oram block length");
  Block b;
  b.valid = bytes[0] != 0;
  std::memcpy(&b.addr, bytes.data() + 1, 8);
  b.payload.assign(bytes.begin() + 9, bytes.end());
  return b;
}

}  // namespace

std::pair<OramClient, OramServerTree> OramClient::init(OramEngine engine, uint64_t capacity,
                                                       size_t payload_bytes,
                                                       uint32_t bucket_size, RandomStream rng,
                                                       size_t max_stash) {
  if (capacity < 1) throw ParameterError("oram capacity must be at least 1");
  if (bucket_size < 1) throw ParameterError("oram bucket size must be at least 1");

  OramClient client;
  client.engine_ = engine;
  client.capacity_ = capacity;
  client.payload_bytes_ = payload_bytes;
  client.max_stash_ = max_stash;
  client.remap_rng_ = rng.split("remap");
  client.crypto_rng_ = rng.split("crypto");
  client.key_ = SecretKey::generate(client.crypto_rng_);

  OramServerTree server;
  if (engine == OramEngine::kLinearScan) {
    client.bucket_size_ = 1;
    client.height_ = 0;
    server.levels = 1;
    server.bucket_size = 1;
    server.slots.reserve(capacity);
    const std::vector<uint8_t> zeros(payload_bytes, 0);
    for (uint64_t i = 0; i < capacity; ++i) {
      server.slots.push_back(client.encrypt_block(false, 0, zeros));
    }
    return {std::move(client), std::move(server)};
  }

  client.bucket_size_ = bucket_size;
  client.height_ = 0;
  while ((1ull << client.height_) < capacity) ++client.height_;
  client.position_.resize(capacity);
  for (uint64_t a = 0; a < capacity; ++a) {
    client.position_[a] = client.remap_rng_.next_below(client.leaf_count());
  }

  server.levels = client.height_ + 1;
  server.bucket_size = bucket_size;
  const uint64_t buckets = (1ull << (client.height_ + 1)) - 1;
  server.slots.reserve(buckets * bucket_size);
  const std::vector<uint8_t> zeros(payload_bytes, 0);
  for (uint64_t i = 0; i < buckets * bucket_size; ++i) {
    server.slots.push_back(client.encrypt_block(false, 0, zeros));
  }
  return {std::move(client), std::move(server)};
}

std::vector<uint64_t> OramClient::path_buckets(uint64_t leaf) const {
  std::vector<uint64_t> path(height_ + 1);
  uint64_t node = (1ull << height_) - 1 + leaf;
  for (uint32_t level = height_ + 1; level-- > 0;) {
    path[level] = node;
    node = node == 0 ? 0 : (node - 1) / 2;
  }
  return path;
}

Ciphertext OramClient::encrypt_block(bool valid, uint64_t addr,
                                     const std::vector<uint8_t>& payload) {
  return encrypt(key_, serialize_block(valid, addr, payload), crypto_rng_);
}

std::vector<uint8_t> OramClient::access(OramServerTree& server, OramOp op, uint64_t addr,
                                        const std::vector<uint8_t>* data) {
  if (addr >= capacity_) throw ParameterError("oram address out of range");
  if (op == OramOp::kWrite) {
    if (data == nullptr) throw ParameterError("write needs a data block");
    if (data->size() != payload_bytes_) throw ParameterError("bad block size");
  }
  if (engine_ == OramEngine::kLinearScan) return linear_access(server, op, addr, data);

  const uint64_t leaf = position_[addr];
  position_[addr] = remap_rng_.next_below(leaf_count());

  const std::vector<uint64_t> path = path_buckets(leaf);
  std::vector<uint64_t> slot_indices;
  slot_indices.reserve(path.size() * bucket_size_);
  for (uint64_t bucket : path) {
    for (uint32_t s = 0; s < bucket_size_; ++s) {
      slot_indices.push_back(bucket * bucket_size_ + s);
    }
  }
  server.trace.record_fetch(slot_indices);

  for (uint64_t idx : slot_indices) {
    Block block = parse_block(decrypt(key_, server.slots[idx]));
    if (block.valid) stash_[block.addr] = std::move(block.payload);
  }

  std::vector<uint8_t> result(payload_bytes_, 0);
  if (auto it = stash_.find(addr); it != stash_.end()) result = it->second;
  if (op == OramOp::kWrite) stash_[addr] = *data;

  // Greedy eviction, leaf level first. A block may live in any path bucket
  // whose subtree contains its (fresh) leaf.
  for (uint32_t level = height_ + 1; level-- > 0;) {
    const uint64_t bucket = path[level];
    const uint64_t subtree_lo = (bucket + 1) << (height_ - level);
    const uint64_t leaf_lo = subtree_lo - (1ull << height_);
    const uint64_t leaf_hi = leaf_lo + (1ull << (height_ - level));

    std::vector<std::pair<uint64_t, std::vector<uint8_t>>> chosen;
    for (auto it = stash_.begin(); it != stash_.end() && chosen.size() < bucket_size_;) {
      const uint64_t pos = position_[it->first];
      if (pos >= leaf_lo && pos < leaf_hi) {
        chosen.emplace_back(it->first, std::move(it->second));
        it = stash_.erase(it);
      } else {
        ++it;
      }
    }
    const std::vector<uint8_t> zeros(payload_bytes_, 0);
    for (uint32_t s = 0; s < bucket_size_; ++s) {
      if (s < chosen.size()) {
        server.slots[bucket * bucket_size_ + s] =
            encrypt_block(true, chosen[s].first, chosen[s].second);
      } else {
        server.slots[bucket * bucket_size_ + s] = encrypt_block(false, 0, zeros);
      }
    }
  }

  if (stash_.size() > max_stash_) {
    throw OramOverflowError("stash exceeded configured bound of " +
                            std::to_string(max_stash_));
  }
  return result;
}

std::vector<uint8_t> OramClient::linear_access(OramServerTree& server, OramOp op,
                                               uint64_t addr,
                                               const std::vector<uint8_t>* data) {
  std::vector<uint64_t> slot_indices(capacity_);
  for (uint64_t i = 0; i < capacity_; ++i) slot_indices[i] = i;
  server.trace.record_fetch(slot_indices);

  std::vector<uint8_t> result(payload_bytes_, 0);
  for (uint64_t i = 0; i < capacity_; ++i) {
    Block block = parse_block(decrypt(key_, server.slots[i]));
    const bool hit = block.valid && block.addr == addr;
    if (hit) result = block.payload;
    if (hit && op == OramOp::kWrite) block.payload = *data;
    if (i == addr && !block.valid && op == OramOp::kWrite) {
      block = {true, addr, *data};
    }
    server.slots[i] = encrypt_block(block.valid, block.addr, block.payload);
  }
  return result;
}

std::vector<std::pair<uint64_t, std::optional<uint64_t>>> OramClient::dump_blocks(
    const OramServerTree& server) const {
  std::vector<std::pair<uint64_t, std::optional<uint64_t>>> out;
  for (size_t idx = 0; idx < server.slots.size(); ++idx) {
    Block block = parse_block(decrypt(key_, server.slots[idx]));
    if (block.valid) out.emplace_back(block.addr, idx / server.bucket_size);
  }
  for (const auto& [addr, payload] : stash_) out.emplace_back(addr, std::nullopt);
  return out;
}

}  // namespace dpstore
