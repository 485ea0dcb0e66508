#include "dpstore/cipher.hpp"

#include <cstring>

#include "dpstore/errors.hpp"

namespace dpstore {

namespace {

uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

uint64_t stream_seed(const SecretKey& key, const std::array<uint8_t, 16>& nonce) {
  uint64_t n0, n1;
  std::memcpy(&n0, nonce.data(), 8);
  std::memcpy(&n1, nonce.data() + 8, 8);
  uint64_t s = mix64(key.words[0] ^ n0);
  s = mix64(s ^ key.words[1] ^ n1);
  s = mix64(s ^ key.words[2]);
  return s;
}

void apply_stream(uint64_t seed, std::vector<uint8_t>& data) {
  uint64_t ctr = 0;
  for (size_t i = 0; i < data.size(); i += 8) {
    uint64_t block = mix64(seed + 0x9e3779b97f4a7c15ull * ++ctr);
    for (size_t j = 0; j < 8 && i + j < data.size(); ++j) {
      data[i + j] ^= static_cast<uint8_t>(block >> (8 * j));
    }
  }
}

uint64_t digest(const SecretKey& key, const std::array<uint8_t, 16>& nonce,
                const uint8_t* data, size_t len) {
  uint64_t h = mix64(key.words[3] ^ stream_seed(key, nonce));
  for (size_t i = 0; i < len; i += 8) {
    uint64_t block = 0;
    std::memcpy(&block, data + i, std::min<size_t>(8, len - i));
    h = mix64(h ^ block);
  }
  return h;
}

}  // namespace

SecretKey SecretKey::generate(RandomStream& rng) {
  SecretKey key;
  for (uint64_t& w : key.words) w = rng.next_u64();
  return key;
}

Ciphertext encrypt(const SecretKey& key, const std::vector<uint8_t>& plaintext,
                   RandomStream& rng) {
  Ciphertext ct;
  for (size_t i = 0; i < ct.nonce.size(); i += 8) {
    uint64_t r = rng.next_u64();
    std::memcpy(ct.nonce.data() + i, &r, 8);
  }
  ct.body = plaintext;
  apply_stream(stream_seed(key, ct.nonce), ct.body);
  const uint64_t tag = digest(key, ct.nonce, ct.body.data(), ct.body.size());
  const size_t n = ct.body.size();
  ct.body.resize(n + 8);
  std::memcpy(ct.body.data() + n, &tag, 8);
  return ct;
}

std::vector<uint8_t> decrypt(const SecretKey& key, const Ciphertext& ct) {
  if (ct.body.size() < 8) throw ProtocolError("ciphertext too short");
  std::vector<uint8_t> data(ct.body.begin(), ct.body.end() - 8);
  uint64_t tag = 0;
  std::memcpy(&tag, ct.body.data() + data.size(), 8);
  if (tag != digest(key, ct.nonce, data.data(), data.size())) {
    throw ProtocolError("ciphertext authentication failed");
  }
  apply_stream(stream_seed(key, ct.nonce), data);
  return data;
}

PlainEntry PlainEntry::real(const KeyedRecord& r) {
  return {false, r.key, r.bits, r.payload};
}

PlainEntry PlainEntry::make_dummy(size_t payload_bytes) {
  return {true, 0, 0, std::vector<uint8_t>(payload_bytes, 0)};
}

std::vector<uint8_t> serialize_entry(const PlainEntry& entry) {
  std::vector<uint8_t> out(9 + entry.payload.size());
  out[0] = entry.dummy ? 1 : 0;
  std::memcpy(out.data() + 1, &entry.key, 4);
  std::memcpy(out.data() + 5, &entry.bits, 4);
  std::memcpy(out.data() + 9, entry.payload.data(), entry.payload.size());
  return out;
}

PlainEntry parse_entry(const std::vector<uint8_t>& bytes, size_t payload_bytes) {
  if (bytes.size() != 9 + payload_bytes) throw ProtocolError("bad entry length");
  PlainEntry entry;
  entry.dummy = bytes[0] != 0;
  std::memcpy(&entry.key, bytes.data() + 1, 4);
  std::memcpy(&entry.bits, bytes.data() + 5, 4);
  entry.payload.assign(bytes.begin() + 9, bytes.end());
  return entry;
}

Ciphertext encrypt_entry(const SecretKey& key, const PlainEntry& entry, RandomStream& rng) {
  return encrypt(key, serialize_entry(entry), rng);
}

PlainEntry decrypt_entry(const SecretKey& key, const Ciphertext& ct, size_t payload_bytes) {
  return parse_entry(decrypt(key, ct), payload_bytes);
}

}  // namespace dpstore
