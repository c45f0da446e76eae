#include "ridesafe/detection.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "ridesafe/errors.hpp"

namespace ridesafe::detection {

namespace {

void check_reading(int r, const char* axis) {
  if (r < -kFullScaleCounts || r > kFullScaleCounts)
    throw DomainError(std::string(axis) + " reading out of range: " + std::to_string(r));
}

}  // namespace

void DetectorConfig::validate() const {
  if (threshold_counts <= 0 || threshold_counts >= kFullScaleCounts)
    throw ConfigError("threshold_counts must be in (0, 512)");
  if (confirm_window_ms <= 0) throw ConfigError("confirm_window_ms must be positive");
  if (sample_period_ms <= 0) throw ConfigError("sample_period_ms must be positive");
  if (confirm_window_ms < sample_period_ms) throw ConfigError("confirm_window_ms must be >= sample_period_ms");
  if (staleness_ms <= 0) throw ConfigError("staleness must be positive");
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::monitoring: return "MONITORING";
    case Mode::suspected: return "SUSPECTED";
    case Mode::confirmed: return "CONFIRMED";
  }
  return "?";
}

const char* to_string(Axis a) {
  switch (a) {
    case Axis::x: return "X";
    case Axis::y: return "Y";
    case Axis::both: return "BOTH";
  }
  return "?";
}

bool is_unstable(const TiltSample& sample, const DetectorConfig& config) {
  return std::abs(sample.ax) > config.threshold_counts || std::abs(sample.ay) > config.threshold_counts;
}

double tilt_angle_deg(int reading) {
  check_reading(reading, "tilt");
  const double theta = 90.0 - (reading / 200.0) * 70.0;
  return std::clamp(theta, 0.0, 180.0);
}

Transition ingest_sample(const DetectorState& state, const TiltSample& sample, const DetectorConfig& config) {
  if (sample.timestamp_ms < 0) throw SequencingError("negative timestamp");
  if (state.last_sample && sample.timestamp_ms <= state.last_sample->timestamp_ms)
    throw SequencingError("timestamp " + std::to_string(sample.timestamp_ms) + " does not follow " +
                          std::to_string(state.last_sample->timestamp_ms));
  check_reading(sample.ax, "ax");
  check_reading(sample.ay, "ay");
  check_reading(sample.az, "az");

  Transition t{state, std::nullopt};
  t.state.last_sample = sample;
  const bool unstable = is_unstable(sample, config);

  switch (state.mode) {
    case Mode::monitoring:
      if (unstable) {
        t.state.mode = Mode::suspected;
        t.state.suspected_since_ms = sample.timestamp_ms;
      }
      break;
    case Mode::suspected:
      if (!unstable) {
        t.state.mode = Mode::monitoring;
        t.state.suspected_since_ms.reset();
      } else if (sample.timestamp_ms - *state.suspected_since_ms >= config.confirm_window_ms) {
        t.state.mode = Mode::confirmed;
        const bool x_out = std::abs(sample.ax) > config.threshold_counts;
        const bool y_out = std::abs(sample.ay) > config.threshold_counts;
        AccidentEvent e;
        e.detected_at_ms = *state.suspected_since_ms;
        e.confirmed_at_ms = sample.timestamp_ms;
        e.trigger_axis = x_out && y_out ? Axis::both : x_out ? Axis::x : Axis::y;
        if (e.trigger_axis == Axis::x || (e.trigger_axis == Axis::both && std::abs(sample.ax) > std::abs(sample.ay)))
          e.trigger_value = sample.ax;
        else
          e.trigger_value = sample.ay;
        t.event = e;
      }
      break;
    case Mode::confirmed:
      break;
  }
  return t;
}

DetectorState rearm(const DetectorState& state) {
  DetectorState fresh;
  fresh.last_sample = state.last_sample;
  return fresh;
}

AccidentEvent snapshot_context(AccidentEvent event, const std::optional<nmea::GeoFix>& latest_fix,
                               const std::optional<telemetry::PhysioReading>& latest_physio, std::int64_t now_ms,
                               std::int64_t staleness_ms) {
  event.fix = latest_fix;
  if (latest_physio) {
    auto p = *latest_physio;
    p.stale = telemetry::is_stale(p, now_ms, staleness_ms);
    event.physio = p;
  }
  return event;
}

}  // namespace ridesafe::detection
