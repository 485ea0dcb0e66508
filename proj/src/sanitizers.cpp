#include "dpstore/sanitizers.hpp"

#include <cmath>

#include "dpstore/errors.hpp"
#include "dpstore/offsets.hpp"

namespace dpstore {

namespace {

uint64_t ceil_clamped(double v) {
  const double c = std::ceil(v);
  return c <= 0.0 ? 0 : static_cast<uint64_t>(c);
}

void check_eps_beta(double epsilon, double beta) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be positive and finite");
  }
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw ParameterError("beta must lie in (0, 1)");
  }
}

void cover_rec(const KaryShape& shape, uint32_t level, uint64_t pos, uint64_t a, uint64_t b,
               std::vector<TreeNodeRef>& out) {
  const uint64_t span = shape.span_at(level);
  const uint64_t lo = pos * span + 1;
  const uint64_t hi = lo + span - 1;
  if (hi < a || lo > b) return;
  if (a <= lo && hi <= b) {
    out.push_back({level, pos, lo, hi});
    return;
  }
  for (uint32_t c = 0; c < shape.arity; ++c) {
    cover_rec(shape, level + 1, pos * shape.arity + c, a, b, out);
  }
}

}  // namespace

double NoisyTree::node_value(uint32_t level, uint64_t pos) const {
  return values_[shape_.level_offset(level) + pos];
}

TreeNodeRef NoisyTree::node_ref(uint32_t level, uint64_t pos) const {
  const uint64_t span = shape_.span_at(level);
  return {level, pos, pos * span + 1, (pos + 1) * span};
}

void NoisyTree::add_bin_deltas(const std::vector<double>& delta) {
  if (delta.size() != domain_) throw ParameterError("delta size must match domain");
  for (uint32_t level = 0; level <= shape_.height; ++level) {
    const uint64_t width = shape_.level_width(level);
    const uint64_t span = shape_.span_at(level);
    const uint64_t offset = shape_.level_offset(level);
    for (uint64_t pos = 0; pos < width; ++pos) {
      const uint64_t lo = pos * span;  // 0-based
      if (lo >= domain_) break;
      const uint64_t hi = std::min<uint64_t>(lo + span, domain_);
      double sum = 0.0;
      for (uint64_t i = lo; i < hi; ++i) sum += delta[i];
      values_[offset + pos] += sum;
    }
  }
}

NoisyTree build_range_tree(const Histogram& hist, uint32_t arity, double epsilon,
                           double beta, NoiseMode mode, RandomStream& rng) {
  if (hist.size() < 2) throw ParameterError("range tree needs a domain of at least 2");
  check_eps_beta(epsilon, beta);
  const KaryShape shape = KaryShape::over(hist.size(), arity);
  const double scale = static_cast<double>(shape.height) / epsilon;
  const double mu = solve_min_offset(shape.node_count, scale, beta).mu;

  // Exact subtree counts, leaves first. Padded bins hold zero but still
  // receive noise below.
  std::vector<double> values(shape.node_count, 0.0);
  const uint64_t leaf_offset = shape.level_offset(shape.height);
  for (size_t i = 0; i < hist.size(); ++i) {
    values[leaf_offset + i] = static_cast<double>(hist[i]);
  }
  for (uint32_t level = shape.height; level > 0; --level) {
    const uint64_t width = shape.level_width(level);
    const uint64_t child_offset = shape.level_offset(level);
    const uint64_t parent_offset = shape.level_offset(level - 1);
    for (uint64_t pos = 0; pos < width; ++pos) {
      values[parent_offset + pos / arity] += values[child_offset + pos];
    }
  }
  for (double& v : values) v += centered_noise(mode, scale, rng) + mu;

  return NoisyTree(shape, static_cast<uint32_t>(hist.size()), mu, epsilon, beta,
                   std::move(values));
}

std::vector<TreeNodeRef> min_node_cover(const NoisyTree& tree, uint32_t a, uint32_t b) {
  if (a < 1 || a > b || b > tree.domain()) {
    throw ParameterError("range outside domain [1, N]");
  }
  std::vector<TreeNodeRef> cover;
  cover_rec(tree.shape(), 0, 0, a, b, cover);
  return cover;
}

uint64_t range_count(const NoisyTree& tree, uint32_t a, uint32_t b) {
  double sum = 0.0;
  for (const TreeNodeRef& node : min_node_cover(tree, a, b)) {
    sum += tree.node_value(node.level, node.pos);
  }
  return ceil_clamped(sum);
}

double centered_range_sum(const NoisyTree& tree, uint32_t a, uint32_t b) {
  double sum = 0.0;
  for (const TreeNodeRef& node : min_node_cover(tree, a, b)) {
    sum += tree.node_value(node.level, node.pos) - tree.mu();
  }
  return sum;
}

std::vector<uint64_t> cumulative_from_tree(const NoisyTree& tree) {
  std::vector<uint64_t> cumulative(tree.domain());
  for (uint32_t j = 1; j <= tree.domain(); ++j) {
    cumulative[j - 1] = range_count(tree, 1, j);
  }
  for (uint32_t j = 1; j < tree.domain(); ++j) {
    cumulative[j] = std::max(cumulative[j], cumulative[j - 1]);
  }
  return cumulative;
}

NoisyHistogram build_point_histogram(const Histogram& hist, double epsilon, double beta,
                                     NoiseMode mode, RandomStream& rng) {
  if (hist.empty()) throw ParameterError("histogram must have at least one bin");
  check_eps_beta(epsilon, beta);
  const double scale = 1.0 / epsilon;
  NoisyHistogram result;
  result.mu = solve_min_offset(hist.size(), scale, beta).mu;
  result.epsilon = epsilon;
  result.beta = beta;
  result.released.resize(hist.size());
  for (size_t i = 0; i < hist.size(); ++i) {
    const double truth = static_cast<double>(hist[i]);
    result.released[i] = ceil_clamped(truth + centered_noise(mode, scale, rng) + result.mu);
    if (result.released[i] < hist[i]) {
      throw UndershootError("point histogram released an undercount");
    }
  }
  return result;
}

uint64_t NoisyAttributeIndex::count_for(uint32_t attribute, bool bit) const {
  if (attribute < 1 || attribute > columns) {
    throw ParameterError("attribute index outside [1, k]");
  }
  return bit ? ones[attribute - 1] : zeros[attribute - 1];
}

NoisyAttributeIndex build_attribute_index(const std::vector<uint32_t>& key_bits,
                                          uint32_t columns, double epsilon, double beta,
                                          NoiseMode mode, RandomStream& rng) {
  if (columns < 1 || columns > 32) throw ParameterError("column count must be in [1, 32]");
  check_eps_beta(epsilon, beta);
  const uint64_t n = key_bits.size();
  const double scale = static_cast<double>(columns) / epsilon;
  NoisyAttributeIndex result;
  result.columns = columns;
  result.mu = solve_min_offset(columns, scale, beta).mu;
  result.epsilon = epsilon;
  result.beta = beta;
  result.ones.resize(columns);
  result.zeros.resize(columns);
  for (uint32_t i = 0; i < columns; ++i) {
    uint64_t q = 0;
    for (uint32_t bits : key_bits) q += (bits >> i) & 1u;
    const double q_hat = static_cast<double>(q) + centered_noise(mode, scale, rng);
    result.ones[i] = ceil_clamped(q_hat + result.mu);
    result.zeros[i] = ceil_clamped(static_cast<double>(n) - q_hat + result.mu);
    if (result.ones[i] < q || result.zeros[i] < n - q) {
      throw UndershootError("attribute index released an undercount");
    }
  }
  return result;
}

uint64_t SanitizedIndex::count_for(const Query& q) const {
  switch (q.type) {
    case QueryType::kRange: {
      const auto& tree = std::get<NoisyTree>(index);
      return range_count(tree, q.lo, q.hi);
    }
    case QueryType::kPoint: {
      const auto& hist = std::get<NoisyHistogram>(index);
      if (q.lo < 1 || q.lo > hist.released.size()) {
        throw ParameterError("point outside domain [1, N]");
      }
      return hist.released[q.lo - 1];
    }
    case QueryType::kAttribute: {
      const auto& attrs = std::get<NoisyAttributeIndex>(index);
      return attrs.count_for(q.attribute, q.bit);
    }
  }
  throw ParameterError("unknown query type");
}

SanitizedIndex sanitize(const Database& db, QueryType type, uint32_t tree_arity,
                        double epsilon, double beta, NoiseMode mode, RandomStream& rng) {
  SanitizedIndex result;
  result.type = type;
  result.epsilon = epsilon;
  result.beta = beta;
  switch (type) {
    case QueryType::kRange: {
      NoisyTree tree = build_range_tree(histogram_of(db), tree_arity, epsilon, beta, mode, rng);
      result.alpha_bound = (tree.mu() + 1.0) *
                           static_cast<double>(2ull * (tree.shape().arity - 1) * tree.shape().height);
      result.index = std::move(tree);
      break;
    }
    case QueryType::kPoint: {
      NoisyHistogram hist = build_point_histogram(histogram_of(db), epsilon, beta, mode, rng);
      result.alpha_bound = hist.mu + 1.0;
      result.index = std::move(hist);
      break;
    }
    case QueryType::kAttribute: {
      if (db.attribute_bits == 0) throw ParameterError("database has no attribute bits");
      std::vector<uint32_t> bits;
      bits.reserve(db.records.size());
      for (const KeyedRecord& r : db.records) bits.push_back(r.bits);
      NoisyAttributeIndex attrs =
          build_attribute_index(bits, db.attribute_bits, epsilon, beta, mode, rng);
      result.alpha_bound = attrs.mu + 1.0;
      result.index = std::move(attrs);
      break;
    }
  }
  return result;
}

}  // namespace dpstore
