#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dpstore/bench.hpp"
#include "dpstore/errors.hpp"

namespace {

int error_code(const std::exception& e) {
  if (dynamic_cast<const dpstore::ParameterError*>(&e)) return 2;
  if (dynamic_cast<const dpstore::BudgetExceededError*>(&e)) return 3;
  if (dynamic_cast<const dpstore::BucketOverflowError*>(&e)) return 4;
  if (dynamic_cast<const dpstore::UndershootError*>(&e)) return 5;
  if (dynamic_cast<const dpstore::OramOverflowError*>(&e)) return 6;
  if (dynamic_cast<const dpstore::CapacityError*>(&e)) return 7;
  if (dynamic_cast<const dpstore::UnsupportedOperationError*>(&e)) return 8;
  if (dynamic_cast<const dpstore::ProtocolError*>(&e)) return 9;
  return 1;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dpstore::ParameterError("cannot write file: " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private outsourced database benchmark"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  std::string config_path, report_path, csv_path;
  int64_t seed_override = -1;
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--report", report_path, "write the JSON report here (default stdout)");
  run->add_option("--csv", csv_path, "write per-selectivity CSV here");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate and discretize a CSV dataset");
  std::string in_csv, key_col, binning = "equal-width", bits_cols, out_path;
  uint32_t domain = 0;
  size_t payload_bytes = 64;
  ingest->add_option("--csv", in_csv, "input CSV with a header row")->required();
  ingest->add_option("--key-col", key_col, "numeric column used as the search key")->required();
  ingest->add_option("--domain", domain, "domain size N")->required();
  ingest->add_option("--binning", binning, "none | equal-width | quantile");
  ingest->add_option("--bits-cols", bits_cols, "comma-separated 0/1 attribute columns");
  ingest->add_option("--payload-bytes", payload_bytes, "record payload length");
  ingest->add_option("--out", out_path, "write normalized key,bits rows here");

  // workload
  auto* workload = app.add_subcommand("workload", "print a deterministic query workload");
  std::string kind = "ranges";
  uint32_t wl_domain = 0, wl_bits = 0;
  double selectivity = 0.5;
  workload->add_option("--kind", kind, "all-points | ranges | all-attributes");
  workload->add_option("--domain", wl_domain, "domain size N (points/ranges)");
  workload->add_option("--bits", wl_bits, "attribute count k (all-attributes)");
  workload->add_option("--selectivity", selectivity, "range length fraction of N");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      dpstore::ExperimentConfig config = dpstore::parse_config_file(config_path);
      if (seed_override >= 0) {
        config.seed = static_cast<uint64_t>(seed_override);
      } else if (const char* env = std::getenv("DPSTORE_SEED")) {
        config.seed = std::stoull(env);
      }
      const dpstore::EfficiencyReport report = dpstore::run_experiment(config);
      const std::string json = report.to_json();
      if (report_path.empty()) {
        std::cout << json;
      } else {
        write_file(report_path, json);
      }
      if (!csv_path.empty()) write_file(csv_path, report.to_csv());
      std::cerr << "runtime_ms=" << report.runtime_ms << "\n";
      return 0;
    }
    if (*ingest) {
      std::vector<std::string> bits;
      if (!bits_cols.empty()) {
        std::stringstream ss(bits_cols);
        std::string item;
        while (std::getline(ss, item, ',')) bits.push_back(item);
      }
      dpstore::BinningMode mode = dpstore::BinningMode::kEqualWidth;
      if (binning == "none") mode = dpstore::BinningMode::kNone;
      else if (binning == "quantile") mode = dpstore::BinningMode::kQuantile;
      else if (binning != "equal-width") {
        throw dpstore::ParameterError("unknown binning: " + binning);
      }
      const dpstore::Database db =
          dpstore::ingest_csv(in_csv, key_col, domain, mode, bits, payload_bytes);
      if (!out_path.empty()) {
        std::ostringstream rows;
        rows << "key,bits\n";
        for (const dpstore::KeyedRecord& r : db.records) {
          rows << r.key << ',' << r.bits << '\n';
        }
        write_file(out_path, rows.str());
      }
      std::cout << "{\"records\":" << db.size() << ",\"domain\":" << db.domain_size
                << ",\"attr_bits\":" << db.attribute_bits << "}\n";
      return 0;
    }
    if (*workload) {
      dpstore::WorkloadKind wk = dpstore::WorkloadKind::kRanges;
      uint32_t arg = wl_domain;
      if (kind == "all-points") {
        wk = dpstore::WorkloadKind::kAllPoints;
      } else if (kind == "all-attributes") {
        wk = dpstore::WorkloadKind::kAllAttributes;
        arg = wl_bits;
      } else if (kind != "ranges") {
        throw dpstore::ParameterError("unknown workload kind: " + kind);
      }
      if (arg == 0) throw dpstore::ParameterError("workload needs --domain or --bits");
      for (const dpstore::Query& q : dpstore::gen_workload(wk, arg, selectivity)) {
        switch (q.type) {
          case dpstore::QueryType::kPoint:
            std::cout << "{\"type\":\"point\",\"a\":" << q.lo << "}\n";
            break;
          case dpstore::QueryType::kRange:
            std::cout << "{\"type\":\"range\",\"lo\":" << q.lo << ",\"hi\":" << q.hi << "}\n";
            break;
          case dpstore::QueryType::kAttribute:
            std::cout << "{\"type\":\"attribute\",\"i\":" << q.attribute
                      << ",\"b\":" << (q.bit ? 1 : 0) << "}\n";
            break;
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return error_code(e);
  }
  return 0;
}
