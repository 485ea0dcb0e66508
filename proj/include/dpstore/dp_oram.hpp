#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dpstore/budget.hpp"
#include "dpstore/oram.hpp"
#include "dpstore/record.hpp"
#include "dpstore/rng.hpp"
#include "dpstore/sanitizers.hpp"

namespace dpstore {

struct DpOramConfig {
  std::vector<QueryType> types{QueryType::kRange};
  double epsilon = 1.0;  // total budget, split equally across enabled types
  std::map<QueryType, double> epsilon_per_type;  // optional override
  double beta = 9.5367431640625e-07;             // 2^-20
  uint32_t tree_arity = 16;
  NoiseMode mode = NoiseMode::kLaplace;
  uint32_t bucket_size = 4;  // Path ORAM Z
  OramEngine engine = OramEngine::kPathOram;
  size_t max_stash = 1024;
  // The generic protocol reads c = c_tilde + ceil(count_inflation * n)
  // locations; the overcount wrapper is already folded into the sanitizer, so
  // the default adds nothing.
  double count_inflation = 0.0;
  // Extra pre-provisioned ORAM addresses (dynamic stores); 0 means exactly n.
  uint64_t capacity_override = 0;
};

// Records live once in an ORAM; one sanitized index per enabled query type
// tells the client how many locations to fetch per query. The server's view
// per query is (q, c, one root-to-leaf path per access).
class DpOramSystem {
 public:
  static DpOramSystem setup(const Database& db, const DpOramConfig& config, RandomStream rng);

  // Executes the query protocol: |q(D)| true reads plus c - |q(D)| discarded
  // uniform reads. Returns exactly q(D). If the sanitizer undershoots
  // (c < |q(D)|, probability <= beta) the client still fetches the full
  // result and counts a privacy incident instead of truncating the answer.
  std::vector<KeyedRecord> query(const Query& q);

  // Count channel only (no server interaction); used by count-only runs.
  uint64_t query_count(const Query& q) const;
  uint64_t true_result_size(const Query& q) const;
  std::vector<uint64_t> matching_addresses(const Query& q) const;

  // Core of the query protocol: reads the given addresses, then pads with
  // uniformly random discarded reads until c accesses happened in total.
  std::vector<KeyedRecord> fetch_with_padding(const std::vector<uint64_t>& addrs, uint64_t c);

  const PrivacyBudget& budget() const { return budget_; }
  const SanitizedIndex& index_for(QueryType type) const;
  OramServerTree& server() { return server_; }
  const OramClient& oram() const { return oram_; }
  uint64_t stored_slots() const { return server_.slots.size(); }
  uint64_t privacy_incidents() const { return incidents_; }
  uint64_t address_space() const { return addr_space_; }
  uint64_t capacity() const { return oram_.capacity(); }
  const DpOramConfig& config() const { return config_; }
  std::string server_metadata() const;

  // Mutation points used by the dynamic layer. Addresses are never reused;
  // deletion overwrites the block with a dummy.
  uint64_t append_record(const KeyedRecord& r);  // throws CapacityError when full
  void overwrite_record(uint64_t addr, const KeyedRecord& r);
  void delete_record(uint64_t addr);
  // Burns fresh addresses with dummy blocks (hide-n padding).
  void pad_with_dummies(uint64_t count);
  bool alive(uint64_t addr) const { return alive_[addr]; }
  uint32_t key_at(uint64_t addr) const { return keys_[addr]; }
  uint32_t bits_at(uint64_t addr) const { return bits_[addr]; }
  std::vector<uint8_t> read_block(uint64_t addr) { return oram_.read(server_, addr); }
  uint64_t initial_records() const { return initial_records_; }
  SanitizedIndex& mutable_index(QueryType type);

  // Default-constructed systems are empty shells; use setup().
  DpOramSystem() = default;

 private:
  void rebuild_sorted();

  DpOramConfig config_;
  PrivacyBudget budget_{Epsilon(1.0)};

  // Client state.
  OramClient oram_;
  std::vector<uint32_t> keys_;
  std::vector<uint32_t> bits_;
  std::vector<bool> alive_;
  std::vector<std::pair<uint32_t, uint64_t>> sorted_;  // (key, addr), alive only
  RandomStream padding_rng_{0};
  uint64_t addr_space_ = 0;
  uint64_t initial_records_ = 0;
  uint64_t incidents_ = 0;

  // Server state.
  OramServerTree server_;
  std::map<QueryType, SanitizedIndex> indexes_;
};

}  // namespace dpstore
