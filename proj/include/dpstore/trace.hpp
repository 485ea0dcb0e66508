#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dpstore {

// What the server observes for one query: the ordered indices of the
// ciphertexts it handed back (L_ACCESS) and the count of returned records
// (L_COMM). For tree-of-buckets stores `physical` additionally counts slot
// reads; for atomic stores it equals m_prime.
struct TraceEntry {
  uint64_t query_id = 0;
  std::vector<uint64_t> indices;
  uint64_t m_prime = 0;
  uint64_t physical = 0;
};

class LeakageTrace {
 public:
  // When disabled, per-access index lists are dropped and only the counts are
  // kept (benchmarks over large stores).
  void set_record_indices(bool on) { record_indices_ = on; }

  // Groups subsequent fetches into one per-query entry.
  void begin_query();
  void end_query(uint64_t m_prime);

  // Records one server fetch. Outside a query scope this creates a standalone
  // entry with m_prime equal to the fetch size.
  void record_fetch(std::span<const uint64_t> indices);

  // Accounting entry for runs that do not materialize fetches.
  void record_counts(uint64_t m_prime, uint64_t physical);

  const std::vector<TraceEntry>& entries() const { return entries_; }
  uint64_t total_comm() const;
  void clear() { entries_.clear(); }

  // One JSON object per query: {"query_id": ..., "indices": [...], "m_prime": ...}.
  std::string to_json_lines() const;

 private:
  std::vector<TraceEntry> entries_;
  bool record_indices_ = true;
  bool open_ = false;
};

struct TraceReport {
  std::vector<std::vector<uint64_t>> access_pattern;  // per query
  std::vector<uint64_t> comm_volume;                  // per query
};

TraceReport trace_report(const LeakageTrace& trace);

}  // namespace dpstore
