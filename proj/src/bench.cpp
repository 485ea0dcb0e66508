#include "dpstore/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dpstore/dp_oram.hpp"
#include "dpstore/errors.hpp"
#include "dpstore/point_store.hpp"
#include "dpstore/range_store.hpp"

namespace dpstore {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_number(const std::string& value, const std::string& key) {
  // Accepts plain numbers and the 2^-x shorthand used for beta.
  if (value.rfind("2^", 0) == 0) {
    try {
      return std::pow(2.0, std::stod(value.substr(2)));
    } catch (const std::exception&) {
      throw ParameterError("bad value for " + key + ": " + value);
    }
  }
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("bad value for " + key + ": " + value);
  }
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParameterError("bad boolean for " + key + ": " + value);
}

QueryType parse_type(const std::string& value) {
  if (value == "range") return QueryType::kRange;
  if (value == "point") return QueryType::kPoint;
  if (value == "attribute") return QueryType::kAttribute;
  throw ParameterError("unknown query type: " + value);
}

struct RunningStat {
  uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  double stddev() const {
    return count < 2 ? 0.0 : std::sqrt(m2 / static_cast<double>(count - 1));
  }
};

struct QueryGroup {
  double selectivity = 0.0;
  std::vector<Query> queries;
};

// True result sizes from the plaintext keys; O(1) per query after prefix sums.
struct TrueCounter {
  std::vector<uint64_t> prefix;  // prefix[i] = records with key <= i
  std::vector<uint64_t> ones;    // per attribute column
  uint64_t n = 0;

  explicit TrueCounter(const Database& db) {
    prefix.assign(db.domain_size + 1, 0);
    for (const KeyedRecord& r : db.records) ++prefix[r.key];
    for (uint32_t i = 1; i <= db.domain_size; ++i) prefix[i] += prefix[i - 1];
    ones.assign(db.attribute_bits, 0);
    for (const KeyedRecord& r : db.records) {
      for (uint32_t i = 0; i < db.attribute_bits; ++i) ones[i] += (r.bits >> i) & 1u;
    }
    n = db.size();
  }

  uint64_t count(const Query& q) const {
    switch (q.type) {
      case QueryType::kPoint:
        return prefix[q.lo] - prefix[q.lo - 1];
      case QueryType::kRange:
        return prefix[q.hi] - prefix[q.lo - 1];
      case QueryType::kAttribute:
        return q.bit ? ones[q.attribute - 1] : n - ones[q.attribute - 1];
    }
    return 0;
  }
};

uint32_t default_buckets(uint32_t domain) {
  const uint32_t b = static_cast<uint32_t>(
      std::lround(4.0 * std::log2(static_cast<double>(std::max<uint32_t>(domain, 2)))));
  return std::min(std::max<uint32_t>(b, 1), domain);
}

const char* system_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::kAtomicRange:
      return "atomic-range";
    case SystemKind::kAtomicPointPlain:
      return "atomic-point-plain";
    case SystemKind::kAtomicPointHashed:
      return "atomic-point-hashed";
    case SystemKind::kDpOram:
      return "dp-oram";
  }
  return "?";
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(line_no) + " is not key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "system") {
      if (value == "atomic-range") config.system = SystemKind::kAtomicRange;
      else if (value == "atomic-point-plain") config.system = SystemKind::kAtomicPointPlain;
      else if (value == "atomic-point-hashed") config.system = SystemKind::kAtomicPointHashed;
      else if (value == "dp-oram") config.system = SystemKind::kDpOram;
      else throw ParameterError("unknown system: " + value);
    } else if (key == "epsilon") {
      config.epsilon = parse_number(value, key);
    } else if (key == "beta") {
      config.beta = parse_number(value, key);
    } else if (key == "seed") {
      config.seed = static_cast<uint64_t>(parse_number(value, key));
    } else if (key == "domain") {
      config.domain = static_cast<uint32_t>(parse_number(value, key));
    } else if (key == "attr_bits") {
      config.attr_bits = static_cast<uint32_t>(parse_number(value, key));
    } else if (key == "records") {
      config.records = static_cast<uint64_t>(parse_number(value, key));
    } else if (key == "data") {
      if (value == "uniform") config.data = DataKind::kUniform;
      else if (value == "zipf") config.data = DataKind::kZipf;
      else if (value == "csv") config.data = DataKind::kCsv;
      else throw ParameterError("unknown data kind: " + value);
    } else if (key == "zipf_exponent") {
      config.zipf_exponent = parse_number(value, key);
    } else if (key == "csv") {
      config.csv_path = value;
    } else if (key == "key_column") {
      config.key_column = value;
    } else if (key == "binning") {
      if (value == "none") config.binning = BinningMode::kNone;
      else if (value == "equal-width") config.binning = BinningMode::kEqualWidth;
      else if (value == "quantile") config.binning = BinningMode::kQuantile;
      else throw ParameterError("unknown binning: " + value);
    } else if (key == "bits_columns") {
      config.bits_columns = split(value, ',');
    } else if (key == "payload_bytes") {
      config.payload_bytes = static_cast<size_t>(parse_number(value, key));
    } else if (key == "buckets") {
      config.buckets = static_cast<uint32_t>(parse_number(value, key));
    } else if (key == "tree_arity") {
      config.tree_arity = static_cast<uint32_t>(parse_number(value, key));
    } else if (key == "theta") {
      config.theta = parse_number(value, key);
    } else if (key == "merge_buckets") {
      config.merge_buckets = static_cast<uint32_t>(parse_number(value, key));
    } else if (key == "oram_bucket_size") {
      config.oram_bucket_size = static_cast<uint32_t>(parse_number(value, key));
    } else if (key == "types") {
      config.types.clear();
      for (const std::string& t : split(value, ',')) config.types.push_back(parse_type(t));
    } else if (key == "count_inflation") {
      config.count_inflation = parse_number(value, key);
    } else if (key == "workload") {
      if (value == "all-points") config.workload = WorkloadKind::kAllPoints;
      else if (value == "ranges") config.workload = WorkloadKind::kRanges;
      else if (value == "all-attributes") config.workload = WorkloadKind::kAllAttributes;
      else throw ParameterError("unknown workload: " + value);
    } else if (key == "selectivities") {
      config.selectivities.clear();
      for (const std::string& s : split(value, ',')) {
        config.selectivities.push_back(parse_number(s, key));
      }
    } else if (key == "trials") {
      config.trials = static_cast<uint32_t>(parse_number(value, key));
    } else if (key == "noise") {
      if (value == "laplace") config.noise = NoiseMode::kLaplace;
      else if (value == "geometric") config.noise = NoiseMode::kTwoSidedGeometric;
      else if (value == "disabled") config.noise = NoiseMode::kDisabled;
      else throw ParameterError("unknown noise mode: " + value);
    } else if (key == "virtual") {
      config.virtual_fetch = parse_bool(value, key);
    } else {
      throw ParameterError("unknown config key: " + key);
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

Database ingest_csv(const std::string& path, const std::string& key_column, uint32_t domain,
                    BinningMode binning, const std::vector<std::string>& bits_columns,
                    size_t payload_bytes) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open csv file: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    Database empty;
    empty.domain_size = domain;
    empty.attribute_bits = static_cast<uint32_t>(bits_columns.size());
    empty.payload_bytes = payload_bytes;
    return empty;
  }

  const std::vector<std::string> header = split(line, ',');
  const auto column_of = [&](const std::string& name) -> size_t {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ParameterError("csv has no column named '" + name + "'");
  };
  const size_t key_idx = column_of(key_column);
  std::vector<size_t> bit_idx;
  for (const std::string& name : bits_columns) bit_idx.push_back(column_of(name));

  struct Row {
    double key_value;
    uint32_t bits;
    std::string text;
  };
  std::vector<Row> rows;
  std::vector<size_t> bad_rows;
  size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    bool ok = fields.size() >= header.size();
    Row row{0.0, 0, line};
    if (ok) {
      try {
        size_t pos = 0;
        row.key_value = std::stod(fields[key_idx], &pos);
        ok = pos == fields[key_idx].size();
      } catch (const std::exception&) {
        ok = false;
      }
      for (size_t i = 0; ok && i < bit_idx.size(); ++i) {
        const std::string& v = fields[bit_idx[i]];
        if (v == "1" || v == "true") row.bits |= 1u << i;
        else if (v != "0" && v != "false") ok = false;
      }
    }
    if (!ok) {
      bad_rows.push_back(row_no);
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (!bad_rows.empty()) {
    std::string msg = "unparsable csv rows:";
    for (size_t r : bad_rows) msg += " " + std::to_string(r);
    throw ParameterError(msg);
  }

  Database db;
  db.domain_size = domain;
  db.attribute_bits = static_cast<uint32_t>(bits_columns.size());
  db.payload_bytes = payload_bytes;
  if (rows.empty()) return db;

  // Discretize into [1, domain].
  std::vector<uint32_t> keys(rows.size());
  if (binning == BinningMode::kNone) {
    for (size_t i = 0; i < rows.size(); ++i) {
      const double v = rows[i].key_value;
      if (v != std::floor(v) || v < 1 || v > domain) {
        throw ParameterError("row " + std::to_string(i + 2) +
                             " key outside domain [1, " + std::to_string(domain) + "]");
      }
      keys[i] = static_cast<uint32_t>(v);
    }
  } else if (binning == BinningMode::kEqualWidth) {
    double lo = rows[0].key_value, hi = rows[0].key_value;
    for (const Row& r : rows) {
      lo = std::min(lo, r.key_value);
      hi = std::max(hi, r.key_value);
    }
    const double width = hi > lo ? hi - lo : 1.0;
    for (size_t i = 0; i < rows.size(); ++i) {
      const double frac = (rows[i].key_value - lo) / width;
      keys[i] = 1 + std::min<uint32_t>(domain - 1,
                                       static_cast<uint32_t>(frac * domain));
    }
  } else {
    std::vector<double> sorted;
    sorted.reserve(rows.size());
    for (const Row& r : rows) sorted.push_back(r.key_value);
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < rows.size(); ++i) {
      const size_t rank = std::lower_bound(sorted.begin(), sorted.end(), rows[i].key_value) -
                          sorted.begin();
      keys[i] = 1 + std::min<uint32_t>(domain - 1,
                                       static_cast<uint32_t>(static_cast<double>(rank) *
                                                             domain / sorted.size()));
    }
  }

  for (size_t i = 0; i < rows.size(); ++i) {
    KeyedRecord record;
    record.key = keys[i];
    record.bits = rows[i].bits;
    record.payload.assign(payload_bytes, 0);
    const size_t len = std::min(payload_bytes, rows[i].text.size());
    std::copy_n(rows[i].text.begin(), len, record.payload.begin());
    db.records.push_back(std::move(record));
  }
  return db;
}

Database synthesize_database(const ExperimentConfig& config) {
  Database db;
  db.domain_size = config.domain;
  db.attribute_bits = config.attr_bits;
  db.payload_bytes = config.payload_bytes;
  RandomStream rng = RandomStream(config.seed).split("data");

  std::vector<double> zipf_cdf;
  if (config.data == DataKind::kZipf) {
    zipf_cdf.resize(config.domain);
    double total = 0.0;
    for (uint32_t k = 1; k <= config.domain; ++k) {
      total += 1.0 / std::pow(static_cast<double>(k), config.zipf_exponent);
      zipf_cdf[k - 1] = total;
    }
    for (double& v : zipf_cdf) v /= total;
  }

  const uint32_t mask_bits = config.attr_bits;
  for (uint64_t i = 0; i < config.records; ++i) {
    KeyedRecord record;
    if (config.data == DataKind::kZipf) {
      const double u = rng.next_unit();
      record.key = 1 + static_cast<uint32_t>(
                           std::lower_bound(zipf_cdf.begin(), zipf_cdf.end(), u) -
                           zipf_cdf.begin());
      record.key = std::min(record.key, config.domain);
    } else {
      record.key = 1 + static_cast<uint32_t>(rng.next_below(config.domain));
    }
    record.bits = mask_bits == 0
                      ? 0
                      : static_cast<uint32_t>(rng.next_u64() &
                                              ((mask_bits >= 32 ? ~0ull : (1ull << mask_bits) - 1)));
    record.payload.resize(config.payload_bytes);
    for (size_t j = 0; j < config.payload_bytes; ++j) {
      record.payload[j] = static_cast<uint8_t>(rng.next_u64());
    }
    db.records.push_back(std::move(record));
  }
  return db;
}

std::vector<Query> gen_workload(WorkloadKind kind, uint32_t domain_or_bits,
                                double selectivity) {
  std::vector<Query> out;
  switch (kind) {
    case WorkloadKind::kAllPoints: {
      for (uint32_t a = 1; a <= domain_or_bits; ++a) out.push_back(Query::point(a));
      break;
    }
    case WorkloadKind::kRanges: {
      if (!(selectivity > 0.0) || selectivity > 1.0) {
        throw ParameterError("selectivity must lie in (0, 1]");
      }
      const uint32_t len = std::max<uint32_t>(
          1, static_cast<uint32_t>(std::ceil(selectivity * domain_or_bits)));
      for (uint32_t a = 1; a + len - 1 <= domain_or_bits; ++a) {
        out.push_back(Query::range(a, a + len - 1));
      }
      break;
    }
    case WorkloadKind::kAllAttributes: {
      for (uint32_t i = 1; i <= domain_or_bits; ++i) {
        out.push_back(Query::attribute_eq(i, false));
        out.push_back(Query::attribute_eq(i, true));
      }
      break;
    }
  }
  return out;
}

namespace {

struct TrialResult {
  uint64_t n_prime = 0;
  uint64_t bucket_reads = 0;
  uint64_t incidents = 0;
  // per group: (m, m_prime) per query
  std::vector<std::vector<std::pair<uint64_t, uint64_t>>> outcomes;
};

TrialResult run_trial(const ExperimentConfig& config, const Database& db,
                      const std::vector<QueryGroup>& groups, RandomStream trial_rng) {
  TrialResult result;
  result.outcomes.resize(groups.size());
  const TrueCounter truth(db);
  const uint32_t buckets = config.buckets > 0 ? config.buckets : default_buckets(config.domain);

  switch (config.system) {
    case SystemKind::kAtomicRange: {
      if (config.virtual_fetch) {
        RandomStream noise_rng = trial_rng.split("noise");
        const BucketPlan plan = plan_range_buckets(db, buckets, config.tree_arity,
                                                   config.epsilon, config.beta, config.noise,
                                                   noise_rng);
        result.n_prime = plan.stored_records();
        for (size_t g = 0; g < groups.size(); ++g) {
          for (const Query& q : groups[g].queries) {
            result.outcomes[g].emplace_back(truth.count(q),
                                            range_query_mprime(plan, q.lo, q.hi));
          }
        }
      } else {
        RangeSetup setup = range_setup(db, buckets, config.tree_arity, config.epsilon,
                                       config.beta, config.noise, trial_rng);
        setup.server.trace.set_record_indices(false);
        result.n_prime = setup.server.ds1.size();
        for (size_t g = 0; g < groups.size(); ++g) {
          for (const Query& q : groups[g].queries) {
            range_query(setup.client, setup.server, q.lo, q.hi);
            result.outcomes[g].emplace_back(truth.count(q),
                                            setup.server.trace.entries().back().m_prime);
          }
        }
      }
      break;
    }
    case SystemKind::kAtomicPointPlain:
    case SystemKind::kAtomicPointHashed: {
      const bool hashed = config.system == SystemKind::kAtomicPointHashed;
      if (config.virtual_fetch) {
        RandomStream noise_rng = trial_rng.split("noise");
        const PointPlan plan =
            hashed ? plan_point_hashed(db, config.epsilon, config.beta, config.theta,
                                       config.merge_buckets, config.noise, noise_rng)
                   : plan_point_plain(db, config.epsilon, config.beta, config.noise, noise_rng);
        result.n_prime = plan.stored_records();
        for (size_t g = 0; g < groups.size(); ++g) {
          for (const Query& q : groups[g].queries) {
            result.outcomes[g].emplace_back(truth.count(q), point_query_mprime(plan, q.lo));
          }
        }
      } else {
        PointSetup setup =
            hashed ? point_setup_hashed(db, config.epsilon, config.beta, config.theta,
                                        config.merge_buckets, config.noise, trial_rng)
                   : point_setup_plain(db, config.epsilon, config.beta, config.noise, trial_rng);
        setup.server.trace.set_record_indices(false);
        result.n_prime = setup.server.ds1.size();
        for (size_t g = 0; g < groups.size(); ++g) {
          for (const Query& q : groups[g].queries) {
            point_query(setup.client, setup.server, q.lo);
            result.outcomes[g].emplace_back(truth.count(q),
                                            setup.server.trace.entries().back().m_prime);
          }
        }
      }
      break;
    }
    case SystemKind::kDpOram: {
      DpOramConfig oram_config;
      oram_config.types = config.types;
      oram_config.epsilon = config.epsilon;
      oram_config.beta = config.beta;
      oram_config.tree_arity = config.tree_arity;
      oram_config.mode = config.noise;
      oram_config.bucket_size = config.oram_bucket_size;
      oram_config.count_inflation = config.count_inflation;

      result.n_prime = db.size();  // records are stored once, no dummies
      uint32_t height = 0;
      while ((1ull << height) < std::max<uint64_t>(1, db.size())) ++height;
      const uint64_t path_len = height + 1;

      if (config.virtual_fetch) {
        // Same sanitizer draws as a real setup (identical split labels),
        // without materializing the ORAM.
        std::map<QueryType, SanitizedIndex> indexes;
        const double each = config.epsilon / static_cast<double>(config.types.size());
        double remaining = config.epsilon;
        for (size_t i = 0; i < config.types.size(); ++i) {
          const QueryType type = config.types[i];
          const double eps = i + 1 == config.types.size() ? remaining : each;
          remaining -= each;
          const char* label = type == QueryType::kRange   ? "noise-range"
                              : type == QueryType::kPoint ? "noise-point"
                                                          : "noise-attribute";
          RandomStream noise_rng = trial_rng.split(label);
          indexes.emplace(type, sanitize(db, type, config.tree_arity, eps, config.beta,
                                         config.noise, noise_rng));
        }
        const uint64_t inflation = static_cast<uint64_t>(
            std::ceil(config.count_inflation * static_cast<double>(db.size())));
        for (size_t g = 0; g < groups.size(); ++g) {
          for (const Query& q : groups[g].queries) {
            const uint64_t m = truth.count(q);
            uint64_t c = indexes.at(q.type).count_for(q) + inflation;
            if (c < m) {
              ++result.incidents;
              c = m;
            }
            result.bucket_reads += c * path_len;
            result.outcomes[g].emplace_back(m, c);
          }
        }
      } else {
        DpOramSystem sys = DpOramSystem::setup(db, oram_config, trial_rng);
        sys.server().trace.set_record_indices(false);
        for (size_t g = 0; g < groups.size(); ++g) {
          for (const Query& q : groups[g].queries) {
            const uint64_t m = truth.count(q);
            sys.query(q);
            result.outcomes[g].emplace_back(m, sys.server().trace.entries().back().m_prime);
          }
        }
        result.incidents = sys.privacy_incidents();
        uint64_t slots = 0;
        for (const TraceEntry& e : sys.server().trace.entries()) slots += e.physical;
        result.bucket_reads = slots / oram_config.bucket_size;
      }
      break;
    }
  }
  return result;
}

void validate_workload(const ExperimentConfig& config) {
  const bool is_point_system = config.system == SystemKind::kAtomicPointPlain ||
                               config.system == SystemKind::kAtomicPointHashed;
  switch (config.workload) {
    case WorkloadKind::kAllPoints: {
      if (config.system == SystemKind::kAtomicRange) {
        throw ParameterError("atomic-range serves range workloads");
      }
      if (config.system == SystemKind::kDpOram &&
          std::find(config.types.begin(), config.types.end(), QueryType::kPoint) ==
              config.types.end()) {
        throw ParameterError("point workload needs the point query type enabled");
      }
      break;
    }
    case WorkloadKind::kRanges: {
      if (is_point_system) throw ParameterError("point stores serve point workloads");
      if (config.system == SystemKind::kDpOram &&
          std::find(config.types.begin(), config.types.end(), QueryType::kRange) ==
              config.types.end()) {
        throw ParameterError("range workload needs the range query type enabled");
      }
      break;
    }
    case WorkloadKind::kAllAttributes: {
      if (config.system != SystemKind::kDpOram) {
        throw ParameterError("attribute queries need the dp-oram system");
      }
      if (std::find(config.types.begin(), config.types.end(), QueryType::kAttribute) ==
          config.types.end()) {
        throw ParameterError("attribute workload needs the attribute query type enabled");
      }
      if (config.attr_bits == 0) throw ParameterError("attribute workload needs attr_bits");
      break;
    }
  }
}

}  // namespace

EfficiencyReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.trials < 1) throw ParameterError("trials must be at least 1");
  validate_workload(config);

  const Database db = config.data == DataKind::kCsv
                          ? ingest_csv(config.csv_path, config.key_column, config.domain,
                                       config.binning, config.bits_columns,
                                       config.payload_bytes)
                          : synthesize_database(config);

  std::vector<QueryGroup> groups;
  if (config.workload == WorkloadKind::kRanges) {
    for (double s : config.selectivities) {
      groups.push_back({s, gen_workload(WorkloadKind::kRanges, config.domain, s)});
    }
  } else if (config.workload == WorkloadKind::kAllPoints) {
    groups.push_back({0.0, gen_workload(WorkloadKind::kAllPoints, config.domain)});
  } else {
    groups.push_back({0.0, gen_workload(WorkloadKind::kAllAttributes, db.attribute_bits)});
  }

  RandomStream root(config.seed);
  RandomStream trial_root = root.split("trial");

  EfficiencyReport report;
  report.system = system_name(config.system);
  report.seed = config.seed;
  report.trials = config.trials;
  report.epsilon = config.epsilon;
  report.beta = config.beta;
  report.n = db.size();

  RunningStat storage_stat;
  RunningStat overall;  // per-trial mean over all m>0 queries
  std::vector<RunningStat> group_stats(groups.size());
  std::vector<uint64_t> group_counts(groups.size(), 0);
  uint64_t zero_m_queries = 0;
  double zero_m_sum = 0.0;

  for (uint32_t trial = 0; trial < config.trials; ++trial) {
    const TrialResult result = run_trial(config, db, groups, trial_root.split(trial));
    if (trial == 0) report.n_prime = result.n_prime;
    if (db.size() > 0) {
      storage_stat.add(static_cast<double>(result.n_prime) / static_cast<double>(db.size()));
    }
    report.oram_bucket_reads += result.bucket_reads;
    report.privacy_incidents += result.incidents;

    RunningStat trial_overall;
    for (size_t g = 0; g < groups.size(); ++g) {
      RunningStat trial_group;
      for (const auto& [m, m_prime] : result.outcomes[g]) {
        report.total_m_prime += m_prime;
        if (m == 0) {
          ++zero_m_queries;
          zero_m_sum += static_cast<double>(m_prime);
          continue;
        }
        const double a = static_cast<double>(m_prime) / static_cast<double>(m);
        trial_group.add(a);
        trial_overall.add(a);
      }
      if (trial_group.count > 0) {
        group_stats[g].add(trial_group.mean);
        group_counts[g] += trial_group.count;
      }
    }
    if (trial_overall.count > 0) {
      overall.add(trial_overall.mean);
      report.comm_queries += trial_overall.count;
    }
  }

  report.storage_a = storage_stat.count > 0 ? storage_stat.mean : 0.0;
  report.comm_mean_a = overall.mean;
  report.comm_stddev_a = overall.stddev();
  report.zero_m_queries = zero_m_queries;
  report.zero_m_mean_m_prime =
      zero_m_queries > 0 ? zero_m_sum / static_cast<double>(zero_m_queries) : 0.0;
  if (config.workload == WorkloadKind::kRanges) {
    for (size_t g = 0; g < groups.size(); ++g) {
      report.by_selectivity.push_back({groups[g].selectivity, group_counts[g],
                                       group_stats[g].mean, group_stats[g].stddev()});
    }
  }
  report.runtime_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return report;
}

std::string EfficiencyReport::to_json() const {
  nlohmann::json j;
  j["system"] = system;
  j["seed"] = seed;
  j["trials"] = trials;
  j["parameters"] = {{"epsilon", epsilon}, {"beta", beta}};
  j["storage"] = {{"n", n}, {"n_prime", n_prime}, {"a", storage_a}};
  nlohmann::json comm;
  comm["queries"] = comm_queries;
  comm["mean_a"] = comm_mean_a;
  comm["stddev_a"] = comm_stddev_a;
  comm["zero_m"] = {{"queries", zero_m_queries}, {"mean_m_prime", zero_m_mean_m_prime}};
  nlohmann::json by_sel = nlohmann::json::array();
  for (const SelectivityStats& s : by_selectivity) {
    by_sel.push_back({{"selectivity", s.selectivity},
                      {"queries", s.queries},
                      {"mean_a", s.mean_a},
                      {"stddev_a", s.stddev_a}});
  }
  comm["by_selectivity"] = by_sel;
  comm["total_m_prime"] = total_m_prime;
  j["communication"] = comm;
  j["oram_bucket_reads"] = oram_bucket_reads;
  j["privacy_incidents"] = privacy_incidents;
  return j.dump(2) + "\n";
}

std::string EfficiencyReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "selectivity,mean_a,stddev\n";
  for (const SelectivityStats& s : by_selectivity) {
    out << s.selectivity << ',' << s.mean_a << ',' << s.stddev_a << '\n';
  }
  return out.str();
}

}  // namespace dpstore
