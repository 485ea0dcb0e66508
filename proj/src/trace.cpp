#include "dpstore/trace.hpp"

#include <sstream>

namespace dpstore {

void LeakageTrace::begin_query() {
  TraceEntry entry;
  entry.query_id = entries_.size();
  entries_.push_back(std::move(entry));
  open_ = true;
}

void LeakageTrace::end_query(uint64_t m_prime) {
  entries_.back().m_prime = m_prime;
  open_ = false;
}

void LeakageTrace::record_fetch(std::span<const uint64_t> indices) {
  if (!open_) {
    TraceEntry entry;
    entry.query_id = entries_.size();
    entry.m_prime = indices.size();
    entry.physical = indices.size();
    if (record_indices_) entry.indices.assign(indices.begin(), indices.end());
    entries_.push_back(std::move(entry));
    return;
  }
  TraceEntry& entry = entries_.back();
  entry.physical += indices.size();
  if (record_indices_) entry.indices.insert(entry.indices.end(), indices.begin(), indices.end());
}

void LeakageTrace::record_counts(uint64_t m_prime, uint64_t physical) {
  TraceEntry entry;
  entry.query_id = entries_.size();
  entry.m_prime = m_prime;
  entry.physical = physical;
  entries_.push_back(std::move(entry));
}

uint64_t LeakageTrace::total_comm() const {
  uint64_t total = 0;
  for (const TraceEntry& e : entries_) total += e.m_prime;
  return total;
}

std::string LeakageTrace::to_json_lines() const {
  std::ostringstream out;
  for (const TraceEntry& e : entries_) {
    out << "{\"query_id\":" << e.query_id << ",\"indices\":[";
    for (size_t i = 0; i < e.indices.size(); ++i) {
      if (i) out << ',';
      out << e.indices[i];
    }
    out << "],\"m_prime\":" << e.m_prime << "}\n";
  }
  return out.str();
}

TraceReport trace_report(const LeakageTrace& trace) {
  TraceReport report;
  for (const TraceEntry& e : trace.entries()) {
    report.access_pattern.push_back(e.indices);
    report.comm_volume.push_back(e.m_prime);
  }
  return report;
}

}  // namespace dpstore
