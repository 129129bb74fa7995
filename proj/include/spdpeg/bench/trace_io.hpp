#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "spdpeg/trace.hpp"

namespace spdpeg::bench {

inline constexpr int kTraceSchemaVersion = 1;
inline constexpr const char* kTraceHeader =
  "schema_version,iteration,wall_seconds,objective,test_loss,accuracy,feasibility_gap,max_dual_norm";

/// Doubles are printed with 17 significant digits so a trace re-reads exactly.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
void write_trace_csv_file(const std::string& path, const std::vector<TraceRecord>& trace);

/// Throws InputError on header or schema mismatch, ParseError on bad rows.
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv_file(const std::string& path);

/// "trace_<solver>_seed<S>.csv"
std::string trace_file_name(const std::string& solver, std::uint64_t seed);

} // namespace spdpeg::bench
