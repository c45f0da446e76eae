#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ridesafe::telemetry {

inline constexpr double kPulseMinBpm = 20.0;
inline constexpr double kPulseMaxBpm = 250.0;
inline constexpr double kSpo2MinPct = 0.0;
inline constexpr double kSpo2MaxPct = 100.0;
inline constexpr std::int32_t kBatteryMaxMv = 65535;
inline constexpr std::size_t kSmoothingWindow = 4;
inline constexpr std::int64_t kDefaultStalenessMs = 10'000;

struct PhysioReading {
  double pulse_bpm = 0.0;
  double spo2_pct = 0.0;
  std::int64_t received_at_ms = 0;
  bool stale = false;  // derived by the receiver, never sent on the wire

  bool operator==(const PhysioReading&) const = default;
};

// One wrist-unit heartbeat. The checksum is derived at encode time and
// verified at decode time, so it is not stored.
struct TelemetryFrame {
  std::uint16_t seq = 0;
  double pulse_bpm = 0.0;  // one decimal place on the wire
  double spo2_pct = 0.0;   // one decimal place on the wire
  std::int32_t battery_mv = 0;

  bool operator==(const TelemetryFrame&) const = default;
};

// "PHY,<seq>,<pulse>,<spo2>,<battery_mv>*<CK>\n". Throws EncodeError.
std::string encode_frame(const TelemetryFrame& frame);

// Accepts the line with or without its trailing '\n'. Throws FramingError,
// ChecksumError or RangeError.
TelemetryFrame decode_frame(std::string_view line);

// Mean of the newest min(size, 4) readings; `history` is ordered oldest
// first. Throws NoData when empty.
PhysioReading smooth(std::span<const PhysioReading> history);

// Two display lines; nullopt renders the "--" placeholders.
std::array<std::string, 2> format_display(const std::optional<PhysioReading>& reading);

bool is_stale(const PhysioReading& reading, std::int64_t now_ms,
              std::int64_t staleness_ms = kDefaultStalenessMs);

enum class FrameOutcome { accepted, duplicate, framing_error, checksum_error, range_error };

const char* to_string(FrameOutcome o);

struct LinkCounters {
  std::uint64_t accepted = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t framing_errors = 0;
  std::uint64_t checksum_errors = 0;
  std::uint64_t range_errors = 0;
  std::uint64_t lost_frames = 0;  // inferred from sequence gaps

  std::uint64_t dropped() const { return framing_errors + checksum_errors + range_errors; }
};

// Helmet-side end of the physio link. Raw lines are queued as they arrive
// and decoded when the owner drains the queue on its tick.
class TelemetryLink {
 public:
  struct Drained {
    std::int64_t arrived_at_ms;
    FrameOutcome outcome;
    std::optional<TelemetryFrame> frame;
    std::uint64_t gap = 0;  // frames lost immediately before this one
  };

  void push(std::string line, std::int64_t arrived_at_ms);
  std::vector<Drained> drain();

  // Smoothed latest reading, stale flag evaluated at now_ms.
  std::optional<PhysioReading> latest(std::int64_t now_ms,
                                      std::int64_t staleness_ms = kDefaultStalenessMs) const;
  const std::deque<PhysioReading>& history() const { return history_; }
  const LinkCounters& counters() const { return counters_; }
  std::optional<std::int32_t> battery_mv() const { return battery_mv_; }

 private:
  std::deque<std::pair<std::string, std::int64_t>> fifo_;
  std::deque<PhysioReading> history_;
  std::optional<std::uint16_t> last_seq_;
  std::optional<std::int32_t> battery_mv_;
  LinkCounters counters_;
};

}  // namespace ridesafe::telemetry
