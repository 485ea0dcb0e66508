#include "dpstore/point_store.hpp"

#include <cmath>
#include <sstream>

#include "dpstore/errors.hpp"
#include "dpstore/sanitizers.hpp"

namespace dpstore {

namespace {

uint64_t hash_bin(uint64_t seed, uint32_t bin) {
  uint64_t z = seed ^ (0x9e3779b97f4a7c15ull * (bin + 1));
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

void finish_offsets(PointPlan& plan) {
  plan.group_offset.resize(plan.group_released.size());
  uint64_t offset = 0;
  for (size_t g = 0; g < plan.group_released.size(); ++g) {
    plan.group_offset[g] = offset;
    offset += plan.group_released[g];
  }
}

std::string plan_metadata(const PointPlan& plan) {
  std::ostringstream out;
  out << "{\"groups\":[";
  for (size_t g = 0; g < plan.group_released.size(); ++g) {
    if (g) out << ',';
    out << plan.group_released[g];
  }
  out << "]}";
  return out.str();
}

PointSetup materialize(const Database& db, PointPlan plan, PrivacyBudget budget,
                       RandomStream& crypto_rng, RandomStream& shuffle_rng,
                       double epsilon, double beta) {
  PointSetup setup{{std::move(plan), SecretKey::generate(crypto_rng), epsilon, beta,
                    db.size(), db.payload_bytes, std::move(budget)},
                   {}};
  const PointPlan& p = setup.client.plan;

  std::vector<std::vector<const KeyedRecord*>> members(p.group_released.size());
  for (const KeyedRecord& r : db.records) {
    if (r.key < 1 || r.key > p.domain) throw ParameterError("record key outside domain");
    members[p.bin_group[r.key - 1]].push_back(&r);
  }

  setup.server.ds1.reserve(p.stored_records());
  for (size_t g = 0; g < members.size(); ++g) {
    std::vector<PlainEntry> entries;
    entries.reserve(p.group_released[g]);
    for (const KeyedRecord* r : members[g]) entries.push_back(PlainEntry::real(*r));
    while (entries.size() < p.group_released[g]) {
      entries.push_back(PlainEntry::make_dummy(db.payload_bytes));
    }
    for (size_t i = entries.size(); i > 1; --i) {
      std::swap(entries[i - 1], entries[shuffle_rng.next_below(i)]);
    }
    for (const PlainEntry& entry : entries) {
      setup.server.ds1.push_back(encrypt_entry(setup.client.key, entry, crypto_rng));
    }
  }
  setup.server.ds2 = plan_metadata(p);
  return setup;
}

}  // namespace

uint64_t PointPlan::stored_records() const {
  uint64_t total = 0;
  for (uint64_t len : group_released) total += len;
  return total;
}

PointPlan plan_point_plain(const Database& db, double epsilon, double beta, NoiseMode mode,
                           RandomStream& rng) {
  const Histogram hist = histogram_of(db);
  NoisyHistogram noisy = build_point_histogram(hist, epsilon, beta, mode, rng);

  PointPlan plan;
  plan.variant = PointPlan::Variant::kPlain;
  plan.domain = db.domain_size;
  plan.mu = noisy.mu;
  plan.bin_group.resize(db.domain_size);
  for (uint32_t i = 0; i < db.domain_size; ++i) plan.bin_group[i] = i;
  plan.group_released = std::move(noisy.released);
  finish_offsets(plan);
  return plan;
}

PointPlan plan_point_hashed(const Database& db, double epsilon, double beta, double theta,
                            uint32_t merge_buckets, NoiseMode mode, RandomStream& rng) {
  const Histogram hist = histogram_of(db);
  const uint32_t domain = db.domain_size;
  if (theta <= 0) theta = 10.0 * std::sqrt(2.0) / epsilon;

  // Phase one, half the budget: classify bins as heavy or light from noisy
  // counts only. The raw counts never drive any later choice directly.
  const double half = epsilon / 2.0;
  std::vector<bool> heavy(domain);
  uint32_t light = 0;
  for (uint32_t i = 0; i < domain; ++i) {
    const double noisy = static_cast<double>(hist[i]) + centered_noise(mode, 1.0 / half, rng);
    heavy[i] = noisy >= theta;
    if (!heavy[i]) ++light;
  }

  PointPlan plan;
  plan.variant = PointPlan::Variant::kHashed;
  plan.domain = domain;
  plan.theta = theta;
  plan.light_bins = light;
  if (merge_buckets == 0) {
    merge_buckets = static_cast<uint32_t>(std::llround(20.0 * std::sqrt(static_cast<double>(light))));
  }
  if (light > 0 && merge_buckets == 0) merge_buckets = 1;
  plan.merge_buckets = light > 0 ? merge_buckets : 0;

  // Two-choice placement of light bins: each bin hashes to two buckets and
  // joins the one currently holding fewer bins, ties to the first.
  const uint64_t seed_a = rng.next_u64();
  const uint64_t seed_b = rng.next_u64();
  const uint32_t heavy_count = domain - light;
  std::vector<uint32_t> bucket_load(plan.merge_buckets, 0);
  plan.bin_group.resize(domain);
  Histogram merged(heavy_count + plan.merge_buckets, 0);
  uint32_t next_heavy_group = 0;
  for (uint32_t i = 0; i < domain; ++i) {
    if (heavy[i]) {
      plan.bin_group[i] = next_heavy_group;
      merged[next_heavy_group] += hist[i];
      ++next_heavy_group;
    } else {
      const uint32_t b1 = static_cast<uint32_t>(hash_bin(seed_a, i) % plan.merge_buckets);
      const uint32_t b2 = static_cast<uint32_t>(hash_bin(seed_b, i) % plan.merge_buckets);
      const uint32_t chosen = bucket_load[b2] < bucket_load[b1] ? b2 : b1;
      ++bucket_load[chosen];
      plan.bin_group[i] = heavy_count + chosen;
      merged[heavy_count + chosen] += hist[i];
    }
  }

  // Phase two, remaining budget: pad every group over the merged domain.
  NoisyHistogram noisy = build_point_histogram(merged, half, beta, mode, rng);
  plan.mu = noisy.mu;
  plan.group_released = std::move(noisy.released);
  finish_offsets(plan);
  return plan;
}

PointSetup point_setup_plain(const Database& db, double epsilon, double beta, NoiseMode mode,
                             RandomStream rng) {
  RandomStream noise_rng = rng.split("noise");
  RandomStream crypto_rng = rng.split("crypto");
  RandomStream shuffle_rng = rng.split("shuffle");
  PrivacyBudget budget =
      PrivacyBudget(Epsilon(epsilon)).charged("point-histogram", Epsilon(epsilon),
                                              CompositionKind::kSequential);
  PointPlan plan = plan_point_plain(db, epsilon, beta, mode, noise_rng);
  return materialize(db, std::move(plan), std::move(budget), crypto_rng, shuffle_rng,
                     epsilon, beta);
}

PointSetup point_setup_hashed(const Database& db, double epsilon, double beta, double theta,
                              uint32_t merge_buckets, NoiseMode mode, RandomStream rng) {
  RandomStream noise_rng = rng.split("noise");
  RandomStream crypto_rng = rng.split("crypto");
  RandomStream shuffle_rng = rng.split("shuffle");
  const double half = epsilon / 2.0;
  PrivacyBudget budget =
      PrivacyBudget(Epsilon(epsilon))
          .charged("heavy-discovery", Epsilon(half), CompositionKind::kSequential)
          .charged("point-histogram", Epsilon(epsilon - half), CompositionKind::kSequential);
  PointPlan plan = plan_point_hashed(db, epsilon, beta, theta, merge_buckets, mode, noise_rng);
  return materialize(db, std::move(plan), std::move(budget), crypto_rng, shuffle_rng,
                     epsilon, beta);
}

std::vector<KeyedRecord> point_query(const PointClientIndex& index, ServerStore& store,
                                     uint32_t a) {
  if (a < 1 || a > index.plan.domain) throw ParameterError("point outside domain [1, N]");
  const uint32_t group = index.plan.bin_group[a - 1];
  const uint64_t offset = index.plan.group_offset[group];
  const uint64_t length = index.plan.group_released[group];
  std::vector<uint64_t> slots(length);
  for (uint64_t s = 0; s < length; ++s) slots[s] = offset + s;

  store.trace.begin_query();
  const std::vector<Ciphertext> fetched = server_fetch(store, slots);
  store.trace.end_query(length);

  std::vector<KeyedRecord> result;
  for (const Ciphertext& ct : fetched) {
    PlainEntry entry = decrypt_entry(index.key, ct, index.payload_bytes);
    if (!entry.dummy && entry.key == a) result.push_back(entry.to_record());
  }
  return result;
}

uint64_t point_query_mprime(const PointPlan& plan, uint32_t a) {
  if (a < 1 || a > plan.domain) throw ParameterError("point outside domain [1, N]");
  return plan.group_released[plan.bin_group[a - 1]];
}

}  // namespace dpstore
