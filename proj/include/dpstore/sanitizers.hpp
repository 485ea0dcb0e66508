#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "dpstore/kary.hpp"
#include "dpstore/noise.hpp"
#include "dpstore/record.hpp"
#include "dpstore/rng.hpp"

namespace dpstore {

struct TreeNodeRef {
  uint32_t level = 0;
  uint64_t pos = 0;  // index within the level
  uint64_t lo = 1;   // covered domain range, 1-based inclusive
  uint64_t hi = 1;
};

// Complete k-ary tree over the domain padded to the next power of the arity.
// Every node holds its exact subtree count plus centered noise of scale
// height/epsilon plus the positivity offset mu, so node sums are overcounts
// except with probability beta. Immutable once built; queries are read-only.
class NoisyTree {
 public:
  NoisyTree(KaryShape shape, uint32_t domain, double mu, double epsilon, double beta,
            std::vector<double> values)
      : shape_(shape), domain_(domain), mu_(mu), epsilon_(epsilon), beta_(beta),
        values_(std::move(values)) {}

  const KaryShape& shape() const { return shape_; }
  uint32_t domain() const { return domain_; }
  double mu() const { return mu_; }
  double epsilon() const { return epsilon_; }
  double beta() const { return beta_; }
  double noise_scale() const { return static_cast<double>(shape_.height) / epsilon_; }

  double node_value(uint32_t level, uint64_t pos) const;
  TreeNodeRef node_ref(uint32_t level, uint64_t pos) const;

  // Offset the value sum by delta[bin] for every bin a node covers; used by
  // dynamic rebuilds. `delta` has one entry per domain position.
  void add_bin_deltas(const std::vector<double>& delta);

 private:
  KaryShape shape_;
  uint32_t domain_;
  double mu_, epsilon_, beta_;
  std::vector<double> values_;
};

NoisyTree build_range_tree(const Histogram& hist, uint32_t arity, double epsilon,
                           double beta, NoiseMode mode, RandomStream& rng);

// Minimal set of disjoint, node-aligned ranges whose union is exactly [a, b];
// at most 2(arity-1) * height nodes. 1 <= a <= b <= domain.
std::vector<TreeNodeRef> min_node_cover(const NoisyTree& tree, uint32_t a, uint32_t b);

// Sum of the node values over the minimum cover, rounded up and clamped at 0.
uint64_t range_count(const NoisyTree& tree, uint32_t a, uint32_t b);

// Same sum with the per-node offset removed; unbiased view used for bucket
// border placement (removing the known offsets is post-processing).
double centered_range_sum(const NoisyTree& tree, uint32_t a, uint32_t b);

// Entry j (1-based) = range_count(tree, [1, j]), made monotone by a
// max-prefix pass.
std::vector<uint64_t> cumulative_from_tree(const NoisyTree& tree);

// Per-bin released overcounts: ceil(true + Laplace(mu_p, 1/epsilon)) with mu_p
// solved for draws = N. Throws UndershootError if any released count falls
// below its true count (probability <= beta).
struct NoisyHistogram {
  std::vector<uint64_t> released;
  double mu = 0.0;
  double epsilon = 0.0;
  double beta = 0.0;
};

NoisyHistogram build_point_histogram(const Histogram& hist, double epsilon, double beta,
                                     NoiseMode mode, RandomStream& rng);

// Per-column released overcounts for attribute queries: ones[i] covers
// q_{i+1,1}, zeros[i] covers q_{i+1,0}; both derive from one noisy count
// q_hat_i = q_i + Laplace(0, k/epsilon).
struct NoisyAttributeIndex {
  uint32_t columns = 0;
  std::vector<uint64_t> ones;
  std::vector<uint64_t> zeros;
  double mu = 0.0;
  double epsilon = 0.0;
  double beta = 0.0;

  uint64_t count_for(uint32_t attribute, bool bit) const;
};

NoisyAttributeIndex build_attribute_index(const std::vector<uint32_t>& key_bits,
                                          uint32_t columns, double epsilon, double beta,
                                          NoiseMode mode, RandomStream& rng);

// The differentially private structure DS a sanitizer ships to the server,
// answering count queries with guaranteed overcounts (error in [0, 2 alpha]
// except with probability beta).
struct SanitizedIndex {
  QueryType type = QueryType::kPoint;
  std::variant<NoisyHistogram, NoisyTree, NoisyAttributeIndex> index;
  double epsilon = 0.0;
  double beta = 0.0;
  double alpha_bound = 0.0;

  uint64_t count_for(const Query& q) const;
};

SanitizedIndex sanitize(const Database& db, QueryType type, uint32_t tree_arity,
                        double epsilon, double beta, NoiseMode mode, RandomStream& rng);

}  // namespace dpstore
