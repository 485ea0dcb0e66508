#include "dpstore/range_store.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpstore/errors.hpp"
#include "dpstore/offsets.hpp"
#include "dpstore/sanitizers.hpp"

namespace dpstore {

namespace {

void check_query_range(uint32_t lo, uint32_t hi, uint32_t domain) {
  if (lo < 1 || lo > hi || hi > domain) {
    throw ParameterError("query range outside domain [1, N]");
  }
}

std::string plan_metadata(const BucketPlan& plan) {
  std::ostringstream out;
  out << "{\"buckets\":" << plan.buckets << ",\"capacity\":" << plan.capacity
      << ",\"borders\":[";
  for (size_t i = 0; i < plan.borders.size(); ++i) {
    if (i) out << ',';
    out << plan.borders[i];
  }
  out << "]}";
  return out.str();
}

}  // namespace

std::vector<uint32_t> BucketPlan::intersecting(uint32_t lo, uint32_t hi) const {
  std::vector<uint32_t> result;
  for (uint32_t j = 0; j < buckets; ++j) {
    const uint32_t bucket_lo = borders[j] + 1;
    const uint32_t bucket_hi = borders[j + 1];
    if (bucket_lo <= hi && lo <= bucket_hi) result.push_back(j);
  }
  return result;
}

BucketPlan plan_range_buckets(const Database& db, uint32_t buckets, uint32_t tree_arity,
                              double epsilon, double beta, NoiseMode mode,
                              RandomStream& rng) {
  const uint32_t domain = db.domain_size;
  if (buckets < 1) throw ParameterError("bucket count must be at least 1");
  if (buckets > domain) throw ParameterError("bucket count cannot exceed the domain size");
  const Histogram hist = histogram_of(db);
  const uint64_t n = db.size();

  const NoisyTree tree = build_range_tree(hist, tree_arity, epsilon, beta, mode, rng);
  const uint64_t per_bucket = (n + buckets - 1) / buckets;
  const uint64_t mu_b =
      static_cast<uint64_t>(solve_bucket_offset(n, buckets, tree_arity, domain, epsilon, beta).mu);

  BucketPlan plan;
  plan.buckets = buckets;
  plan.capacity = per_bucket + mu_b;
  plan.mu_b = mu_b;
  plan.borders.resize(buckets + 1);
  plan.borders[0] = 0;
  plan.borders[buckets] = domain;

  // Monotone noisy CDF with the known per-node offsets removed; border j sits
  // at the first position whose noisy prefix reaches j * ceil(n/b).
  std::vector<double> cdf(domain);
  double running = 0.0;
  for (uint32_t x = 1; x <= domain; ++x) {
    running = std::max(running, centered_range_sum(tree, 1, x));
    cdf[x - 1] = running;
  }
  uint32_t x = 1;
  for (uint32_t j = 1; j < buckets; ++j) {
    const double target = static_cast<double>(j) * static_cast<double>(per_bucket);
    while (x < domain && cdf[x - 1] < target) ++x;
    uint32_t border = x;
    border = std::max(border, plan.borders[j - 1] + 1);   // keep strictly increasing
    border = std::min(border, domain - (buckets - j));    // leave room for the rest
    plan.borders[j] = border;
  }

  for (uint32_t j = 0; j < buckets; ++j) {
    uint64_t true_count = 0;
    for (uint32_t pos = plan.borders[j] + 1; pos <= plan.borders[j + 1]; ++pos) {
      true_count += hist[pos - 1];
    }
    if (true_count > plan.capacity) {
      throw BucketOverflowError("bucket true count " + std::to_string(true_count) +
                                " exceeds capacity " + std::to_string(plan.capacity));
    }
  }
  return plan;
}

RangeSetup range_setup(const Database& db, uint32_t buckets, uint32_t tree_arity,
                       double epsilon, double beta, NoiseMode mode, RandomStream rng) {
  RandomStream noise_rng = rng.split("noise");
  RandomStream crypto_rng = rng.split("crypto");
  RandomStream shuffle_rng = rng.split("shuffle");

  PrivacyBudget budget =
      PrivacyBudget(Epsilon(epsilon)).charged("range-tree", Epsilon(epsilon),
                                              CompositionKind::kSequential);
  BucketPlan plan = plan_range_buckets(db, buckets, tree_arity, epsilon, beta, mode, noise_rng);

  RangeSetup setup{{plan, SecretKey::generate(crypto_rng), epsilon, beta, db.size(),
                    db.payload_bytes, budget},
                   {}};

  // Group records by bucket, pad with dummies, shuffle within the bucket, and
  // upload. Every bucket occupies exactly `capacity` slots.
  std::vector<std::vector<const KeyedRecord*>> members(plan.buckets);
  for (const KeyedRecord& r : db.records) {
    const uint32_t j = static_cast<uint32_t>(
        std::upper_bound(plan.borders.begin() + 1, plan.borders.end() - 1, r.key - 1) -
        (plan.borders.begin() + 1));
    members[j].push_back(&r);
  }

  setup.server.ds1.reserve(plan.stored_records());
  for (uint32_t j = 0; j < plan.buckets; ++j) {
    std::vector<PlainEntry> entries;
    entries.reserve(plan.capacity);
    for (const KeyedRecord* r : members[j]) entries.push_back(PlainEntry::real(*r));
    while (entries.size() < plan.capacity) {
      entries.push_back(PlainEntry::make_dummy(db.payload_bytes));
    }
    for (size_t i = entries.size(); i > 1; --i) {
      std::swap(entries[i - 1], entries[shuffle_rng.next_below(i)]);
    }
    for (const PlainEntry& entry : entries) {
      setup.server.ds1.push_back(encrypt_entry(setup.client.key, entry, crypto_rng));
    }
  }
  setup.server.ds2 = plan_metadata(plan);
  return setup;
}

std::vector<KeyedRecord> range_query(const RangeClientIndex& index, ServerStore& store,
                                     uint32_t lo, uint32_t hi) {
  check_query_range(lo, hi, index.plan.borders.back());
  std::vector<uint64_t> slots;
  for (uint32_t j : index.plan.intersecting(lo, hi)) {
    for (uint64_t s = 0; s < index.plan.capacity; ++s) {
      slots.push_back(static_cast<uint64_t>(j) * index.plan.capacity + s);
    }
  }
  store.trace.begin_query();
  const std::vector<Ciphertext> fetched = server_fetch(store, slots);
  store.trace.end_query(slots.size());

  std::vector<KeyedRecord> result;
  for (const Ciphertext& ct : fetched) {
    PlainEntry entry = decrypt_entry(index.key, ct, index.payload_bytes);
    if (!entry.dummy && lo <= entry.key && entry.key <= hi) {
      result.push_back(entry.to_record());
    }
  }
  return result;
}

uint64_t range_query_mprime(const BucketPlan& plan, uint32_t lo, uint32_t hi) {
  check_query_range(lo, hi, plan.borders.back());
  return plan.intersecting(lo, hi).size() * plan.capacity;
}

}  // namespace dpstore
