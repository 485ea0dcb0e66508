#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dpstore/record.hpp"
#include "dpstore/rng.hpp"

namespace dpstore {

// Mock randomized cipher: keyed pseudorandom stream XOR with a fresh nonce,
// authenticated by a keyed digest. Not cryptographically strong; it exists to
// give the stores the right API and indistinguishability structure (fresh
// nonce per encryption, length independent of content).
struct SecretKey {
  std::array<uint64_t, 4> words{};

  static SecretKey generate(RandomStream& rng);
};

struct Ciphertext {
  std::array<uint8_t, 16> nonce{};
  std::vector<uint8_t> body;  // payload stream-xored, followed by an 8-byte tag

  size_t size_bytes() const { return nonce.size() + body.size(); }
};

Ciphertext encrypt(const SecretKey& key, const std::vector<uint8_t>& plaintext,
                   RandomStream& rng);

// Throws ProtocolError if the authentication tag does not match.
std::vector<uint8_t> decrypt(const SecretKey& key, const Ciphertext& ct);

// Fixed-length plaintext layout carried inside store ciphertexts:
// [dummy flag u8][key u32][bits u32][payload kappa bytes]. Dummies use the
// all-zero sentinel payload; the flag is never visible through the cipher.
struct PlainEntry {
  bool dummy = false;
  uint32_t key = 0;
  uint32_t bits = 0;
  std::vector<uint8_t> payload;

  static PlainEntry real(const KeyedRecord& r);
  static PlainEntry make_dummy(size_t payload_bytes);

  KeyedRecord to_record() const { return {key, bits, payload}; }
};

std::vector<uint8_t> serialize_entry(const PlainEntry& entry);
PlainEntry parse_entry(const std::vector<uint8_t>& bytes, size_t payload_bytes);

Ciphertext encrypt_entry(const SecretKey& key, const PlainEntry& entry, RandomStream& rng);
PlainEntry decrypt_entry(const SecretKey& key, const Ciphertext& ct, size_t payload_bytes);

}  // namespace dpstore
