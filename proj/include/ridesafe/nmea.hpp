#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ridesafe::nmea {

enum class FixQuality { no_fix, gps_fix, dgps_fix };

const char* to_string(FixQuality q);

struct UtcTime {
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millisecond = 0;

  std::int64_t millis_of_day() const;
  static UtcTime from_millis_of_day(std::int64_t ms);
  // "hh:mm:ss.sss"
  std::string to_string() const;

  bool operator==(const UtcTime&) const = default;
};

// Decoded position. When quality is no_fix the coordinates are withheld
// (zero) and must not be used for location links.
struct GeoFix {
  double latitude_deg = 0.0;   // south negative
  double longitude_deg = 0.0;  // west negative
  FixQuality quality = FixQuality::no_fix;
  std::optional<UtcTime> timestamp_utc;
  std::optional<int> satellites;

  bool has_position() const { return quality != FixQuality::no_fix; }
  bool operator==(const GeoFix&) const = default;
};

struct NmeaSentence {
  std::string talker_type;          // e.g. "GPGGA"
  std::vector<std::string> fields;  // everything after the talker, in order
  std::uint8_t checksum = 0;

  // Last three characters of the talker type ("GGA", "RMC").
  std::string_view sentence_id() const;
};

// Uppercase two-digit XOR checksum of the bytes between '$' and '*'.
std::string checksum(std::string_view payload);

// Validates framing and checksum. Throws FramingError, ChecksumError or
// UnsupportedSentence (well-formed but not GGA/RMC).
NmeaSentence parse_sentence(std::string_view line);

// Throws FieldError on malformed coordinates or missing fields.
GeoFix to_geofix(const NmeaSentence& sentence);

// Renders a GGA sentence (with checksum, without line terminator).
std::string format_gga(const GeoFix& fix);

// Renders an RMC sentence (with checksum, without line terminator).
std::string format_rmc(const GeoFix& fix);

struct ParseCounters {
  std::uint64_t accepted = 0;
  std::uint64_t no_fix = 0;
  std::uint64_t framing_errors = 0;
  std::uint64_t checksum_errors = 0;
  std::uint64_t unsupported = 0;
  std::uint64_t field_errors = 0;

  std::uint64_t dropped() const {
    return framing_errors + checksum_errors + unsupported + field_errors;
  }
};

enum class LineOutcome { fix, no_fix, framing_error, checksum_error, unsupported, field_error };

const char* to_string(LineOutcome o);

// Latest-valid-fix register. NO_FIX sentences refresh the sentence clock but
// never overwrite the last good coordinates.
class FixTracker {
 public:
  LineOutcome ingest(std::string_view line, std::int64_t now_ms);
  void update(const GeoFix& fix, std::int64_t now_ms);

  const std::optional<GeoFix>& latest() const { return latest_; }
  std::optional<std::int64_t> fix_age_ms(std::int64_t now_ms) const;
  std::optional<std::int64_t> last_sentence_ms() const { return last_sentence_ms_; }
  std::optional<std::int64_t> last_fix_ms() const { return last_fix_ms_; }
  const ParseCounters& counters() const { return counters_; }

  // UTC wall time at now_ms, extrapolated from the most recent timestamped
  // sentence. Used for transcript annotations only.
  std::optional<UtcTime> utc_at(std::int64_t now_ms) const;

 private:
  std::optional<GeoFix> latest_;
  std::optional<std::int64_t> last_fix_ms_;
  std::optional<std::int64_t> last_sentence_ms_;
  std::optional<UtcTime> last_utc_;
  std::int64_t last_utc_ms_ = 0;
  ParseCounters counters_;
};

}  // namespace ridesafe::nmea
