#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dpstore/dp_oram.hpp"
#include "dpstore/point_store.hpp"
#include "dpstore/range_store.hpp"

namespace dpstore {

enum class UpdateKind { kAdd, kDelete, kModify };

struct Update {
  UpdateKind kind = UpdateKind::kAdd;
  std::optional<uint32_t> old_key;  // delete/modify
  std::optional<uint32_t> new_key;  // add/modify
  std::optional<uint32_t> new_bits;
  std::optional<std::vector<uint8_t>> payload;
};

enum class PushResult { kBuffered, kFlushed };

// Continual counter over batches: a binary tree of dyadic intervals whose
// nodes hold noisy sums of fixed-width delta vectors. Noise scale is
// (ceil(log2 horizon) + 1) / epsilon per node entry; each entry also carries
// a positivity offset so prefixes are overcounts except with probability
// beta. Any prefix [1, t] decomposes into at most ceil(log2 t) + 1 nodes.
class DyadicCounter {
 public:
  DyadicCounter(size_t width, uint64_t horizon, double epsilon, double beta, NoiseMode mode);

  void append(const std::vector<int64_t>& batch_delta, RandomStream& rng);

  uint64_t batches() const { return t_; }
  size_t width() const { return width_; }
  double node_offset() const { return mu_; }
  double noise_scale() const { return scale_; }

  std::vector<double> prefix(uint64_t t) const;  // noisy, includes offsets
  std::vector<int64_t> raw_prefix(uint64_t t) const;
  size_t prefix_node_count(uint64_t t) const;
  // How many noisy nodes the given batch (1-based) contributes to so far.
  size_t nodes_covering(uint64_t batch) const;

 private:
  size_t width_;
  uint64_t horizon_;
  double scale_;
  double mu_;
  NoiseMode mode_;
  uint64_t t_ = 0;
  std::vector<std::vector<int64_t>> raw_batches_;
  std::map<std::pair<uint32_t, uint64_t>, std::vector<double>> nodes_;  // (level, idx)
};

struct DynamicConfig {
  DpOramConfig base;
  uint32_t batch_size = 64;      // u
  uint64_t horizon = 1024;       // t_max
  double epsilon_update = 1.0;   // per query-type delta tree
  double epsilon_count = 1.0;    // noisy record counter
  double headroom = 2.0;         // ORAM capacity factor over n
  bool hide_n = false;
};

// Dynamic data over DP ORAM: updates buffer client-side until u of them
// flush as one batch; every flush applies the updates to the ORAM, appends a
// batch to the per-type delta trees, and rebuilds each sanitized index as the
// static index plus the noisy delta prefix.
class DynamicSystem {
 public:
  static DynamicSystem setup(const Database& db, const DynamicConfig& config,
                             RandomStream rng);

  PushResult push_update(const Update& update);

  // Server answer overlaid with the unflushed local buffer.
  std::vector<KeyedRecord> query(const Query& q);

  // Overcount of the current record count via the counter tree; with hide_n
  // the ORAM is padded with dummy blocks to match it.
  uint64_t release_record_count();

  uint64_t batches() const { return t_; }
  size_t pending() const { return pending_.size(); }
  uint64_t true_record_count() const { return n_t_; }
  const DpOramSystem& base() const { return sys_; }
  DpOramSystem& base() { return sys_; }
  const DyadicCounter& delta_tree(QueryType type) const { return deltas_.at(type); }
  const DyadicCounter& count_tree() const { return count_tree_; }
  const PrivacyBudget& update_budget() const { return update_budget_; }

 private:
  DynamicSystem() = default;

  struct ResolvedUpdate {
    UpdateKind kind;
    uint64_t target_addr = 0;  // delete/modify
    uint32_t old_key = 0;
    uint32_t old_bits = 0;
    uint32_t new_key = 0;
    uint32_t new_bits = 0;
    std::vector<uint8_t> payload;
  };

  ResolvedUpdate resolve(const Update& update);
  void flush();
  void rebuild_indexes();

  DynamicConfig config_;
  DpOramSystem sys_;
  PrivacyBudget update_budget_{Epsilon(1.0)};
  uint32_t domain_ = 1;
  uint32_t columns_ = 0;
  uint64_t t_ = 0;
  uint64_t n_t_ = 0;
  std::vector<ResolvedUpdate> pending_;
  std::map<QueryType, DyadicCounter> deltas_;
  std::map<QueryType, SanitizedIndex> static_indexes_;
  DyadicCounter count_tree_{1, 1, 1.0, 0.5, NoiseMode::kDisabled};
  RandomStream update_rng_{0};
};

// The atomic stores reject dynamic operation: rebuilding them per batch is
// impractical and adjusting dummy counts in place would expose which stored
// ciphertexts are dummies.
[[noreturn]] void push_update(const RangeClientIndex& index, const Update& update);
[[noreturn]] void push_update(const PointClientIndex& index, const Update& update);

}  // namespace dpstore
