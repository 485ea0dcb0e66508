#include "dpstore/dynamic.hpp"

#include <algorithm>
#include <cmath>

#include "dpstore/errors.hpp"
#include "dpstore/offsets.hpp"

namespace dpstore {

namespace {

uint32_t log2_ceil(uint64_t v) {
  uint32_t l = 0;
  while ((1ull << l) < v) ++l;
  return l;
}

uint64_t ceil_clamped(double v) {
  const double c = std::ceil(v);
  return c <= 0.0 ? 0 : static_cast<uint64_t>(c);
}

}  // namespace

DyadicCounter::DyadicCounter(size_t width, uint64_t horizon, double epsilon, double beta,
                             NoiseMode mode)
    : width_(width), horizon_(horizon), mode_(mode) {
  if (width < 1) throw ParameterError("counter width must be at least 1");
  if (horizon < 1) throw ParameterError("counter horizon must be at least 1");
  scale_ = static_cast<double>(log2_ceil(horizon) + 1) / epsilon;
  // One offset covers every noisy entry the horizon can produce, so all
  // prefixes released over the lifetime are overcounts together.
  const uint64_t total_entries = width * (2 * horizon - 1);
  mu_ = solve_min_offset(total_entries, scale_, beta).mu;
}

void DyadicCounter::append(const std::vector<int64_t>& batch_delta, RandomStream& rng) {
  if (batch_delta.size() != width_) throw ParameterError("bad delta width");
  if (t_ >= horizon_) throw ParameterError("counter horizon exceeded");
  raw_batches_.push_back(batch_delta);
  ++t_;
  for (uint32_t level = 0; (t_ & ((1ull << level) - 1)) == 0; ++level) {
    const uint64_t span = 1ull << level;
    const uint64_t idx = t_ / span - 1;
    std::vector<double> noisy(width_, 0.0);
    for (uint64_t b = t_ - span; b < t_; ++b) {
      for (size_t i = 0; i < width_; ++i) {
        noisy[i] += static_cast<double>(raw_batches_[b][i]);
      }
    }
    for (size_t i = 0; i < width_; ++i) {
      noisy[i] += centered_noise(mode_, scale_, rng) + mu_;
    }
    nodes_[{level, idx}] = std::move(noisy);
    if (span * 2 > t_) break;
  }
}

std::vector<double> DyadicCounter::prefix(uint64_t t) const {
  if (t > t_) throw ParameterError("prefix beyond appended batches");
  std::vector<double> sum(width_, 0.0);
  uint64_t start = 0;  // 0-based batch position
  uint64_t remaining = t;
  while (remaining > 0) {
    uint32_t level = 0;
    while ((2ull << level) <= remaining && start % (2ull << level) == 0) ++level;
    const uint64_t span = 1ull << level;
    const auto& node = nodes_.at({level, start / span});
    for (size_t i = 0; i < width_; ++i) sum[i] += node[i];
    start += span;
    remaining -= span;
  }
  return sum;
}

std::vector<int64_t> DyadicCounter::raw_prefix(uint64_t t) const {
  if (t > t_) throw ParameterError("prefix beyond appended batches");
  std::vector<int64_t> sum(width_, 0);
  for (uint64_t b = 0; b < t; ++b) {
    for (size_t i = 0; i < width_; ++i) sum[i] += raw_batches_[b][i];
  }
  return sum;
}

size_t DyadicCounter::prefix_node_count(uint64_t t) const {
  size_t count = 0;
  uint64_t start = 0, remaining = t;
  while (remaining > 0) {
    uint32_t level = 0;
    while ((2ull << level) <= remaining && start % (2ull << level) == 0) ++level;
    ++count;
    start += 1ull << level;
    remaining -= 1ull << level;
  }
  return count;
}

size_t DyadicCounter::nodes_covering(uint64_t batch) const {
  size_t count = 0;
  for (const auto& [key, value] : nodes_) {
    const uint64_t span = 1ull << key.first;
    const uint64_t lo = key.second * span + 1;
    if (batch >= lo && batch < lo + span) ++count;
  }
  return count;
}

DynamicSystem DynamicSystem::setup(const Database& db, const DynamicConfig& config,
                                   RandomStream rng) {
  if (config.batch_size < 1) throw ParameterError("batch size must be at least 1");
  if (config.headroom < 1.0) throw ParameterError("headroom factor must be at least 1");

  DynamicSystem sys;
  sys.config_ = config;
  sys.domain_ = db.domain_size;
  sys.columns_ = db.attribute_bits;
  sys.n_t_ = db.size();
  sys.update_rng_ = rng.split("updates");

  if (config.hide_n && config.epsilon_count <= 0) {
    throw ParameterError("hide_n requires epsilon_count > 0");
  }

  DpOramConfig base = config.base;
  base.capacity_override = std::max<uint64_t>(
      1, static_cast<uint64_t>(std::ceil(config.headroom * static_cast<double>(db.size()))));
  sys.sys_ = DpOramSystem::setup(db, base, rng.split("base"));

  double update_total = config.epsilon_update * static_cast<double>(base.types.size());
  if (config.epsilon_count > 0) update_total += config.epsilon_count;
  sys.update_budget_ = PrivacyBudget(Epsilon(update_total));

  for (QueryType type : base.types) {
    size_t width = 0;
    switch (type) {
      case QueryType::kPoint:
      case QueryType::kRange:
        width = db.domain_size;
        break;
      case QueryType::kAttribute:
        width = 2ull * db.attribute_bits;
        break;
    }
    sys.deltas_.emplace(type, DyadicCounter(width, config.horizon, config.epsilon_update,
                                            base.beta, base.mode));
    const char* label = type == QueryType::kPoint    ? "update-point"
                        : type == QueryType::kRange  ? "update-range"
                                                     : "update-attribute";
    sys.update_budget_ = sys.update_budget_.charged(label, Epsilon(config.epsilon_update),
                                                    CompositionKind::kSequential);
    sys.static_indexes_.emplace(type, sys.sys_.index_for(type));
  }
  sys.count_tree_ = DyadicCounter(1, config.horizon,
                                  config.epsilon_count > 0 ? config.epsilon_count : 1.0,
                                  base.beta, base.mode);
  if (config.epsilon_count > 0) {
    sys.update_budget_ = sys.update_budget_.charged(
        "record-counter", Epsilon(config.epsilon_count), CompositionKind::kSequential);
  }
  return sys;
}

DynamicSystem::ResolvedUpdate DynamicSystem::resolve(const Update& update) {
  ResolvedUpdate r;
  r.kind = update.kind;
  const auto find_target = [&](uint32_t key) -> uint64_t {
    for (uint64_t addr = 0; addr < sys_.address_space(); ++addr) {
      if (!sys_.alive(addr) || sys_.key_at(addr) != key) continue;
      bool taken = false;
      for (const ResolvedUpdate& p : pending_) {
        if (p.kind != UpdateKind::kAdd && p.target_addr == addr) {
          taken = true;
          break;
        }
      }
      if (!taken) return addr;
    }
    throw ParameterError("update references no existing record");
  };

  switch (update.kind) {
    case UpdateKind::kAdd: {
      if (!update.new_key) throw ParameterError("add needs a key");
      if (!update.payload) throw ParameterError("add carries a payload");
      r.new_key = *update.new_key;
      r.new_bits = update.new_bits.value_or(0);
      r.payload = *update.payload;
      break;
    }
    case UpdateKind::kDelete: {
      if (!update.old_key) throw ParameterError("delete needs the old key");
      r.target_addr = find_target(*update.old_key);
      r.old_key = *update.old_key;
      r.old_bits = sys_.bits_at(r.target_addr);
      break;
    }
    case UpdateKind::kModify: {
      if (!update.old_key) throw ParameterError("modify needs the old key");
      r.target_addr = find_target(*update.old_key);
      r.old_key = *update.old_key;
      r.old_bits = sys_.bits_at(r.target_addr);
      r.new_key = update.new_key.value_or(r.old_key);
      r.new_bits = update.new_bits.value_or(r.old_bits);
      if (update.payload) {
        r.payload = *update.payload;
      } else {
        // Key-only change: carry the stored payload forward so the buffered
        // record can be answered locally before the flush.
        PlainEntry entry = parse_entry(sys_.read_block(r.target_addr),
                                       sys_.oram().payload_bytes() - 9);
        r.payload = entry.payload;
      }
      break;
    }
  }
  if (r.new_key > domain_ || (update.new_key && *update.new_key < 1)) {
    throw ParameterError("update key outside domain [1, N]");
  }
  return r;
}

PushResult DynamicSystem::push_update(const Update& update) {
  pending_.push_back(resolve(update));
  if (pending_.size() >= config_.batch_size) {
    flush();
    return PushResult::kFlushed;
  }
  return PushResult::kBuffered;
}

void DynamicSystem::flush() {
  ++t_;
  int64_t count_delta = 0;
  std::map<QueryType, std::vector<int64_t>> deltas;
  for (auto& [type, tree] : deltas_) deltas[type] = std::vector<int64_t>(tree.width(), 0);

  for (const ResolvedUpdate& r : pending_) {
    switch (r.kind) {
      case UpdateKind::kAdd: {
        sys_.append_record({r.new_key, r.new_bits, r.payload});
        ++count_delta;
        ++n_t_;
        break;
      }
      case UpdateKind::kDelete: {
        sys_.delete_record(r.target_addr);
        --count_delta;
        --n_t_;
        break;
      }
      case UpdateKind::kModify: {
        sys_.overwrite_record(r.target_addr, {r.new_key, r.new_bits, r.payload});
        break;
      }
    }
    for (auto& [type, delta] : deltas) {
      if (type == QueryType::kPoint || type == QueryType::kRange) {
        if (r.kind == UpdateKind::kAdd) {
          delta[r.new_key - 1] += 1;
        } else if (r.kind == UpdateKind::kDelete) {
          delta[r.old_key - 1] -= 1;
        } else if (r.new_key != r.old_key) {
          delta[r.old_key - 1] -= 1;
          delta[r.new_key - 1] += 1;
        }
      } else {
        for (uint32_t i = 0; i < columns_; ++i) {
          const int old_bit = r.kind == UpdateKind::kAdd ? -1 : ((r.old_bits >> i) & 1);
          const int new_bit = r.kind == UpdateKind::kDelete ? -1 : ((r.new_bits >> i) & 1);
          if (old_bit == new_bit) continue;
          if (old_bit >= 0) delta[2 * i + (old_bit ? 0 : 1)] -= 1;
          if (new_bit >= 0) delta[2 * i + (new_bit ? 0 : 1)] += 1;
        }
      }
    }
  }
  pending_.clear();

  for (auto& [type, tree] : deltas_) tree.append(deltas.at(type), update_rng_);
  count_tree_.append({count_delta}, update_rng_);
  rebuild_indexes();
  if (config_.hide_n) release_record_count();
}

void DynamicSystem::rebuild_indexes() {
  for (auto& [type, static_index] : static_indexes_) {
    const std::vector<double> prefix = deltas_.at(type).prefix(t_);
    SanitizedIndex rebuilt = static_index;
    if (auto* tree = std::get_if<NoisyTree>(&rebuilt.index)) {
      tree->add_bin_deltas(prefix);
    } else if (auto* hist = std::get_if<NoisyHistogram>(&rebuilt.index)) {
      for (size_t i = 0; i < hist->released.size(); ++i) {
        hist->released[i] = ceil_clamped(static_cast<double>(hist->released[i]) + prefix[i]);
      }
    } else if (auto* attrs = std::get_if<NoisyAttributeIndex>(&rebuilt.index)) {
      for (uint32_t i = 0; i < attrs->columns; ++i) {
        attrs->ones[i] = ceil_clamped(static_cast<double>(attrs->ones[i]) + prefix[2 * i]);
        attrs->zeros[i] =
            ceil_clamped(static_cast<double>(attrs->zeros[i]) + prefix[2 * i + 1]);
      }
    }
    sys_.mutable_index(type) = std::move(rebuilt);
  }
}

std::vector<KeyedRecord> DynamicSystem::query(const Query& q) {
  // Addresses whose stored state is stale (pending delete or modify) are
  // skipped; the buffer supplies their current versions.
  std::vector<uint64_t> addrs;
  for (uint64_t addr : sys_.matching_addresses(q)) {
    bool stale = false;
    for (const ResolvedUpdate& r : pending_) {
      if (r.kind != UpdateKind::kAdd && r.target_addr == addr) {
        stale = true;
        break;
      }
    }
    if (!stale) addrs.push_back(addr);
  }

  const uint64_t c = sys_.query_count(q);
  std::vector<KeyedRecord> result = sys_.fetch_with_padding(addrs, c);

  for (const ResolvedUpdate& r : pending_) {
    if (r.kind == UpdateKind::kDelete) continue;
    const KeyedRecord candidate{r.new_key, r.new_bits, r.payload};
    if (matches(q, candidate)) result.push_back(candidate);
  }
  return result;
}

uint64_t DynamicSystem::release_record_count() {
  if (config_.epsilon_count <= 0) {
    throw ParameterError("record counter has no budget (epsilon_count)");
  }
  uint64_t released;
  if (t_ == 0) {
    released = n_t_;
  } else {
    const double noisy_delta = count_tree_.prefix(t_)[0];
    const double base = static_cast<double>(sys_.initial_records());
    released = ceil_clamped(base + noisy_delta);
  }
  if (config_.hide_n && released > sys_.address_space()) {
    sys_.pad_with_dummies(released - sys_.address_space());
  }
  return released;
}

void push_update(const RangeClientIndex&, const Update&) {
  throw UnsupportedOperationError(
      "atomic range stores do not support dynamic updates; rebuild the store instead");
}

void push_update(const PointClientIndex&, const Update&) {
  throw UnsupportedOperationError(
      "atomic point stores do not support dynamic updates; rebuild the store instead");
}

}  // namespace dpstore
