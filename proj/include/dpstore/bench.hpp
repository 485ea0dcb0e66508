#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpstore/noise.hpp"
#include "dpstore/record.hpp"

namespace dpstore {

enum class SystemKind { kAtomicRange, kAtomicPointPlain, kAtomicPointHashed, kDpOram };
enum class WorkloadKind { kAllPoints, kRanges, kAllAttributes };
enum class DataKind { kUniform, kZipf, kCsv };
enum class BinningMode { kNone, kEqualWidth, kQuantile };

struct ExperimentConfig {
  SystemKind system = SystemKind::kAtomicRange;
  double epsilon = 0.1;
  double beta = 9.5367431640625e-07;  // 2^-20
  uint64_t seed = 1;
  uint32_t domain = 1024;  // N
  uint32_t attr_bits = 0;  // k

  DataKind data = DataKind::kUniform;
  uint64_t records = 1000;  // n for synthetic data
  double zipf_exponent = 1.0;
  std::string csv_path;
  std::string key_column;
  BinningMode binning = BinningMode::kEqualWidth;
  std::vector<std::string> bits_columns;
  size_t payload_bytes = 64;

  uint32_t buckets = 0;        // b; 0 selects 4 * log2(N)
  uint32_t tree_arity = 16;    // k_b / k_h
  double theta = 0.0;          // 0 selects 10 * sqrt(2) / epsilon
  uint32_t merge_buckets = 0;  // N_b; 0 selects 20 * sqrt(N_l)
  uint32_t oram_bucket_size = 4;
  std::vector<QueryType> types{QueryType::kRange};  // dp-oram
  double count_inflation = 0.0;

  WorkloadKind workload = WorkloadKind::kRanges;
  std::vector<double> selectivities{0.05, 0.1, 0.2, 0.4, 0.8};
  uint32_t trials = 100;
  NoiseMode noise = NoiseMode::kLaplace;
  // Count-only mode: runs the same planning and counting paths but does not
  // materialize or fetch ciphertexts. Reported numbers are identical to a
  // real run with the same seed.
  bool virtual_fetch = false;
};

// Simple `key = value` config format, '#' comments; see README for the keys.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// CSV ingestion: discretizes `key_column` into [1, domain] with the selected
// binning and packs each row into a fixed payload. Optional 0/1 columns
// become attribute bits. Throws ParameterError listing offending row numbers.
Database ingest_csv(const std::string& path, const std::string& key_column, uint32_t domain,
                    BinningMode binning, const std::vector<std::string>& bits_columns,
                    size_t payload_bytes);

Database synthesize_database(const ExperimentConfig& config);

// Deterministic query enumeration. For kRanges the length is
// ceil(selectivity * N) and every starting position occurs once.
std::vector<Query> gen_workload(WorkloadKind kind, uint32_t domain_or_bits,
                                double selectivity = 0.0);

struct SelectivityStats {
  double selectivity = 0.0;
  uint64_t queries = 0;  // with m > 0, summed over trials
  double mean_a = 0.0;   // mean over trial means
  double stddev_a = 0.0;
};

struct EfficiencyReport {
  std::string system;
  uint64_t seed = 0;
  uint32_t trials = 0;
  double epsilon = 0.0;
  double beta = 0.0;
  uint64_t n = 0;
  uint64_t n_prime = 0;    // first trial
  double storage_a = 0.0;  // mean over trials, n > 0 only
  uint64_t comm_queries = 0;
  double comm_mean_a = 0.0;
  double comm_stddev_a = 0.0;
  uint64_t zero_m_queries = 0;
  double zero_m_mean_m_prime = 0.0;
  std::vector<SelectivityStats> by_selectivity;
  uint64_t total_m_prime = 0;
  uint64_t oram_bucket_reads = 0;
  uint64_t privacy_incidents = 0;
  double runtime_ms = 0.0;  // informational; excluded from serialized output

  std::string to_json() const;
  std::string to_csv() const;
};

EfficiencyReport run_experiment(const ExperimentConfig& config);

}  // namespace dpstore
