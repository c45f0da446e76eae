#pragma once

#include <cstdint>
#include <optional>

#include "ridesafe/nmea.hpp"
#include "ridesafe/telemetry.hpp"

namespace ridesafe::detection {

inline constexpr int kFullScaleCounts = 512;

// One accelerometer reading in raw counts. az is carried for logging only.
struct TiltSample {
  std::int64_t timestamp_ms = 0;
  int ax = 0;
  int ay = 0;
  int az = 0;

  bool operator==(const TiltSample&) const = default;
};

struct DetectorConfig {
  int threshold_counts = 200;
  std::int64_t confirm_window_ms = 5000;
  std::int64_t sample_period_ms = 100;
  std::int64_t staleness_ms = telemetry::kDefaultStalenessMs;

  // Throws ConfigError.
  void validate() const;
};

enum class Mode { monitoring, suspected, confirmed };

const char* to_string(Mode m);

struct DetectorState {
  Mode mode = Mode::monitoring;
  std::optional<std::int64_t> suspected_since_ms;  // set iff suspected/confirmed
  std::optional<TiltSample> last_sample;

  bool operator==(const DetectorState&) const = default;
};

enum class Axis { x, y, both };

const char* to_string(Axis a);

struct AccidentEvent {
  std::int64_t detected_at_ms = 0;
  std::int64_t confirmed_at_ms = 0;
  Axis trigger_axis = Axis::y;
  int trigger_value = 0;  // reading on the trigger axis of the confirming sample
  std::optional<nmea::GeoFix> fix;
  std::optional<telemetry::PhysioReading> physio;

  bool operator==(const AccidentEvent&) const = default;
};

struct Transition {
  DetectorState state;
  std::optional<AccidentEvent> event;
};

// |ax| or |ay| strictly above the threshold. az never participates.
bool is_unstable(const TiltSample& sample, const DetectorConfig& config);

// Affine counts-to-angle map anchored at +200 -> 20 deg, 0 -> 90 deg,
// -200 -> 160 deg, clamped to [0, 180]. Throws DomainError outside
// [-512, 512].
double tilt_angle_deg(int reading);

// Pure transition function. Throws SequencingError when the timestamp does
// not strictly increase and DomainError when a reading is out of range.
Transition ingest_sample(const DetectorState& state, const TiltSample& sample, const DetectorConfig& config);

// Fresh monitoring state that keeps last_sample for sequencing.
DetectorState rearm(const DetectorState& state);

// Attaches the latest fix and vitals to a confirmed event. Vitals older than
// staleness_ms at now_ms are attached with stale set.
AccidentEvent snapshot_context(AccidentEvent event, const std::optional<nmea::GeoFix>& latest_fix,
                               const std::optional<telemetry::PhysioReading>& latest_physio, std::int64_t now_ms,
                               std::int64_t staleness_ms = telemetry::kDefaultStalenessMs);

}  // namespace ridesafe::detection
