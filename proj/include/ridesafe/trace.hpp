#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ridesafe::sim {

struct TiltRecord {
  int ax = 0;
  int ay = 0;
  int az = 0;
  bool operator==(const TiltRecord&) const = default;
};

struct NmeaRecord {
  std::string line;
  bool operator==(const NmeaRecord&) const = default;
};

struct PhyRecord {
  std::string line;
  bool operator==(const PhyRecord&) const = default;
};

struct TraceRecord {
  std::int64_t t_ms = 0;
  std::variant<TiltRecord, NmeaRecord, PhyRecord> payload;

  const char* kind() const;
  bool operator==(const TraceRecord&) const = default;
};

// Ordered multi-sensor event stream. t_ms is non-decreasing overall and
// strictly increasing within a kind.
using RideTrace = std::vector<TraceRecord>;

std::string to_jsonl(const TraceRecord& record);

// Throws TraceError carrying the 1-based line number.
TraceRecord record_from_jsonl(std::string_view line, std::size_t line_no);

void write_trace(std::ostream& out, const RideTrace& trace);

// Parses and validates ordering. Blank lines are skipped. Throws TraceError.
RideTrace read_trace(std::istream& in);

// Throws TraceError (line numbers are 1-based record indices).
void validate_trace(const RideTrace& trace);

}  // namespace ridesafe::sim
