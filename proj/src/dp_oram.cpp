#include "dpstore/dp_oram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpstore/errors.hpp"

namespace dpstore {

namespace {

const char* type_label(QueryType type) {
  switch (type) {
    case QueryType::kRange:
      return "range";
    case QueryType::kPoint:
      return "point";
    case QueryType::kAttribute:
      return "attribute";
  }
  return "?";
}

}  // namespace

DpOramSystem DpOramSystem::setup(const Database& db, const DpOramConfig& config,
                                 RandomStream rng) {
  if (config.types.empty()) throw ParameterError("at least one query type must be enabled");

  DpOramSystem sys;
  sys.config_ = config;
  sys.padding_rng_ = rng.split("padding");

  // Equal shares by default, with the last share taking the exact remainder
  // so the ledger sums to the total.
  std::map<QueryType, double> shares = config.epsilon_per_type;
  if (shares.empty()) {
    const double each = config.epsilon / static_cast<double>(config.types.size());
    double remaining = config.epsilon;
    for (size_t i = 0; i < config.types.size(); ++i) {
      const bool last = i + 1 == config.types.size();
      shares[config.types[i]] = last ? remaining : each;
      remaining -= each;
    }
  }
  double total = 0.0;
  for (QueryType type : config.types) total += shares.at(type);
  sys.budget_ = PrivacyBudget(Epsilon(total));

  // Store the records once, independent of how many query types are enabled.
  const uint64_t n = db.size();
  const uint64_t capacity = std::max<uint64_t>(
      1, config.capacity_override > 0 ? config.capacity_override : n);
  if (capacity < n) throw ParameterError("oram capacity below record count");
  auto [client, server] = OramClient::init(config.engine, capacity, 9 + db.payload_bytes,
                                           config.bucket_size, rng.split("oram"),
                                           config.max_stash);
  sys.oram_ = std::move(client);
  sys.server_ = std::move(server);
  for (uint64_t addr = 0; addr < n; ++addr) {
    sys.oram_.write(sys.server_, addr,
                    serialize_entry(PlainEntry::real(db.records[addr])));
    sys.keys_.push_back(db.records[addr].key);
    sys.bits_.push_back(db.records[addr].bits);
    sys.alive_.push_back(true);
  }
  sys.addr_space_ = n;
  sys.initial_records_ = n;
  sys.rebuild_sorted();

  for (QueryType type : config.types) {
    const double eps = shares.at(type);
    sys.budget_ = sys.budget_.charged(type_label(type), Epsilon(eps),
                                      CompositionKind::kSequential);
    RandomStream noise_rng = rng.split(std::string("noise-") + type_label(type));
    sys.indexes_.emplace(type, sanitize(db, type, config.tree_arity, eps, config.beta,
                                        config.mode, noise_rng));
  }
  return sys;
}

const SanitizedIndex& DpOramSystem::index_for(QueryType type) const {
  auto it = indexes_.find(type);
  if (it == indexes_.end()) throw ParameterError("query type not enabled");
  return it->second;
}

SanitizedIndex& DpOramSystem::mutable_index(QueryType type) {
  auto it = indexes_.find(type);
  if (it == indexes_.end()) throw ParameterError("query type not enabled");
  return it->second;
}

std::vector<uint64_t> DpOramSystem::matching_addresses(const Query& q) const {
  std::vector<uint64_t> addrs;
  switch (q.type) {
    case QueryType::kPoint:
    case QueryType::kRange: {
      const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(),
                                       std::make_pair(q.lo, uint64_t{0}));
      for (auto it = lo; it != sorted_.end() && it->first <= q.hi; ++it) {
        addrs.push_back(it->second);
      }
      break;
    }
    case QueryType::kAttribute: {
      for (uint64_t addr = 0; addr < addr_space_; ++addr) {
        if (!alive_[addr]) continue;
        if ((((bits_[addr] >> (q.attribute - 1)) & 1u) != 0) == q.bit) {
          addrs.push_back(addr);
        }
      }
      break;
    }
  }
  return addrs;
}

uint64_t DpOramSystem::query_count(const Query& q) const {
  const uint64_t c_tilde = index_for(q.type).count_for(q);
  const uint64_t extra = static_cast<uint64_t>(
      std::ceil(config_.count_inflation * static_cast<double>(addr_space_)));
  return c_tilde + extra;
}

uint64_t DpOramSystem::true_result_size(const Query& q) const {
  return matching_addresses(q).size();
}

std::vector<KeyedRecord> DpOramSystem::query(const Query& q) {
  return fetch_with_padding(matching_addresses(q), query_count(q));
}

std::vector<KeyedRecord> DpOramSystem::fetch_with_padding(const std::vector<uint64_t>& addrs,
                                                          uint64_t c) {
  if (c < addrs.size()) {
    ++incidents_;
    c = addrs.size();
  }

  server_.trace.begin_query();
  std::vector<KeyedRecord> result;
  result.reserve(addrs.size());
  for (uint64_t addr : addrs) {
    PlainEntry entry = parse_entry(oram_.read(server_, addr), oram_.payload_bytes() - 9);
    if (entry.dummy) throw ProtocolError("live address held a dummy block");
    result.push_back(entry.to_record());
  }
  const uint64_t span = std::max<uint64_t>(1, addr_space_);
  for (uint64_t i = addrs.size(); i < c; ++i) {
    oram_.read(server_, padding_rng_.next_below(span));  // discarded
  }
  server_.trace.end_query(c);
  return result;
}

uint64_t DpOramSystem::append_record(const KeyedRecord& r) {
  if (addr_space_ >= oram_.capacity()) {
    throw CapacityError("oram address space exhausted");
  }
  const uint64_t addr = addr_space_++;
  oram_.write(server_, addr, serialize_entry(PlainEntry::real(r)));
  keys_.push_back(r.key);
  bits_.push_back(r.bits);
  alive_.push_back(true);
  rebuild_sorted();
  return addr;
}

void DpOramSystem::overwrite_record(uint64_t addr, const KeyedRecord& r) {
  if (addr >= addr_space_) throw ParameterError("address out of range");
  oram_.write(server_, addr, serialize_entry(PlainEntry::real(r)));
  keys_[addr] = r.key;
  bits_[addr] = r.bits;
  rebuild_sorted();
}

void DpOramSystem::delete_record(uint64_t addr) {
  if (addr >= addr_space_) throw ParameterError("address out of range");
  oram_.write(server_, addr,
              serialize_entry(PlainEntry::make_dummy(oram_.payload_bytes() - 9)));
  alive_[addr] = false;
  rebuild_sorted();
}

void DpOramSystem::pad_with_dummies(uint64_t count) {
  for (uint64_t i = 0; i < count; ++i) {
    if (addr_space_ >= oram_.capacity()) {
      throw CapacityError("oram address space exhausted");
    }
    const uint64_t addr = addr_space_++;
    oram_.write(server_, addr,
                serialize_entry(PlainEntry::make_dummy(oram_.payload_bytes() - 9)));
    keys_.push_back(0);
    bits_.push_back(0);
    alive_.push_back(false);
  }
}

void DpOramSystem::rebuild_sorted() {
  sorted_.clear();
  for (uint64_t addr = 0; addr < addr_space_; ++addr) {
    if (alive_[addr]) sorted_.emplace_back(keys_[addr], addr);
  }
  std::sort(sorted_.begin(), sorted_.end());
}

std::string DpOramSystem::server_metadata() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"levels\":" << server_.levels << ",\"bucket_size\":" << server_.bucket_size
      << ",\"slots\":" << server_.slots.size() << ",\"indexes\":{";
  bool first_index = true;
  for (const auto& [type, index] : indexes_) {
    if (!first_index) out << ',';
    first_index = false;
    out << '"' << type_label(type) << "\":[";
    if (const auto* tree = std::get_if<NoisyTree>(&index.index)) {
      for (uint64_t i = 0; i < tree->shape().node_count; ++i) {
        if (i) out << ',';
        uint32_t level = 0;
        uint64_t offset = 0;
        while (i >= offset + tree->shape().level_width(level)) {
          offset += tree->shape().level_width(level);
          ++level;
        }
        out << tree->node_value(level, i - offset);
      }
    } else if (const auto* hist = std::get_if<NoisyHistogram>(&index.index)) {
      for (size_t i = 0; i < hist->released.size(); ++i) {
        if (i) out << ',';
        out << hist->released[i];
      }
    } else if (const auto* attrs = std::get_if<NoisyAttributeIndex>(&index.index)) {
      for (uint32_t i = 0; i < attrs->columns; ++i) {
        if (i) out << ',';
        out << attrs->ones[i] << ',' << attrs->zeros[i];
      }
    }
    out << ']';
  }
  out << "}}";
  return out.str();
}

}  // namespace dpstore
