#pragma once

#include <span>
#include <string>
#include <vector>

#include "dpstore/cipher.hpp"
#include "dpstore/trace.hpp"

namespace dpstore {

// The honest-but-curious server of the atomic model: an array of ciphertexts
// DS1, key-derived metadata DS2 (built by the stores from search keys only),
// and the leakage it records while serving fetches.
struct ServerStore {
  std::vector<Ciphertext> ds1;
  std::string ds2;
  LeakageTrace trace;
};

// Returns the requested ciphertexts and appends the access to the trace.
// Throws ProtocolError on an out-of-bounds index.
std::vector<Ciphertext> server_fetch(ServerStore& store, std::span<const uint64_t> indices);

}  // namespace dpstore
