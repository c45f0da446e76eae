#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ridesafe/detection.hpp"
#include "ridesafe/gsm.hpp"
#include "ridesafe/nmea.hpp"
#include "ridesafe/telemetry.hpp"
#include "ridesafe/trace.hpp"

namespace ridesafe::sim {

inline constexpr int kExitNoAccident = 0;
inline constexpr int kExitAccident = 2;

struct ReplayOptions {
  detection::DetectorConfig detector;
  std::vector<std::string> contacts;
  bool rearm = false;  // leave CONFIRMED on the first stable sample
  gsm::DriverConfig driver;
  gsm::ModemScript modem;
};

struct StateChange {
  std::int64_t t_ms = 0;
  detection::Mode from = detection::Mode::monitoring;
  detection::Mode to = detection::Mode::monitoring;
};

struct ReplayResult {
  std::vector<std::string> transcript;  // JSONL lines, ordered by t_ms
  std::vector<StateChange> transitions;
  std::vector<detection::AccidentEvent> accidents;
  std::vector<std::string> sms_bodies;
  std::vector<gsm::DeliveryReport> deliveries;
  gsm::Transcript modem_transcript;
  telemetry::LinkCounters phy_counters;
  nmea::ParseCounters nmea_counters;

  int exit_code() const { return accidents.empty() ? kExitNoAccident : kExitAccident; }
};

// Feeds every record to its module in order under the trace's virtual
// clock. Queued physio frames are drained before each tilt sample. Throws
// TraceError for an out-of-order trace.
ReplayResult replay(const RideTrace& trace, const ReplayOptions& options);

void write_transcript(std::ostream& out, const ReplayResult& result);

// Overlays a JSON config object onto `base`. Recognised keys:
// threshold_counts, confirm_window_ms, sample_period_ms, staleness_s,
// retries. Throws ConfigError on unknown keys or bad values.
ReplayOptions apply_config_json(std::string_view json_text, ReplayOptions base);

}  // namespace ridesafe::sim
