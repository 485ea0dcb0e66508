#include "dpstore/server_store.hpp"

#include "dpstore/errors.hpp"

namespace dpstore {

std::vector<Ciphertext> server_fetch(ServerStore& store, std::span<const uint64_t> indices) {
  std::vector<Ciphertext> result;
  result.reserve(indices.size());
  for (uint64_t idx : indices) {
    if (idx >= store.ds1.size()) throw ProtocolError("fetch index out of bounds");
    result.push_back(store.ds1[idx]);
  }
  store.trace.record_fetch(indices);
  return result;
}

}  // namespace dpstore
