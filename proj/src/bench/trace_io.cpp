#include "spdpeg/bench/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spdpeg/common.hpp"

namespace spdpeg::bench {

namespace {

std::string fmt_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_field(const std::string& field, std::size_t line)
{
  T value{};
  auto const* first = field.data();
  auto const* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ParseError(line, "bad trace field '" + field + "'");
  return value;
}

} // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace)
{
  out << kTraceHeader << '\n';
  for (auto const& r : trace) {
    out << kTraceSchemaVersion << ',' << r.iteration << ',' << fmt_double(r.wall_seconds) << ','
        << fmt_double(r.objective) << ',' << fmt_double(r.test_loss) << ',' << fmt_double(r.accuracy) << ','
        << fmt_double(r.feasibility_gap) << ',' << fmt_double(r.max_dual_norm) << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const std::vector<TraceRecord>& trace)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  write_trace_csv(out, trace);
  if (!out) throw InputError("write failed: " + path);
}

std::vector<TraceRecord> read_trace_csv(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line)) throw InputError("trace: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw InputError("trace: unexpected header '" + line + "'");

  std::vector<TraceRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 8) throw ParseError(lineno, "expected 8 fields, got " + std::to_string(fields.size()));
    if (parse_field<int>(fields[0], lineno) != kTraceSchemaVersion)
      throw InputError("trace: schema version mismatch at line " + std::to_string(lineno));
    TraceRecord r;
    r.iteration = parse_field<std::uint64_t>(fields[1], lineno);
    r.wall_seconds = parse_field<double>(fields[2], lineno);
    r.objective = parse_field<double>(fields[3], lineno);
    r.test_loss = parse_field<double>(fields[4], lineno);
    r.accuracy = parse_field<double>(fields[5], lineno);
    r.feasibility_gap = parse_field<double>(fields[6], lineno);
    r.max_dual_norm = parse_field<double>(fields[7], lineno);
    out.push_back(r);
  }
  return out;
}

std::vector<TraceRecord> read_trace_csv_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return read_trace_csv(in);
}

std::string trace_file_name(const std::string& solver, std::uint64_t seed)
{
  return "trace_" + solver + "_seed" + std::to_string(seed) + ".csv";
}

} // namespace spdpeg::bench
