#include "ridesafe/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ridesafe/errors.hpp"
#include "ridesafe/telemetry.hpp"

namespace ridesafe::sim {

namespace {

constexpr std::int64_t kPhyOffsetMs = 20;
constexpr std::int64_t kGgaOffsetMs = 50;
constexpr std::int64_t kRmcOffsetMs = 60;
constexpr std::int64_t kRmcEverySeconds = 5;
constexpr std::int64_t kRampMs = 30'000;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [lo, hi] by rejection sampling.
  int uniform(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

 private:
  std::mt19937_64 engine_;
};

std::int64_t to_ms(double seconds) { return std::llround(seconds * 1000.0); }

// First grid instant at or after t.
std::int64_t ceil_to_grid(std::int64_t t, std::int64_t period) { return (t + period - 1) / period * period; }

double lerp(double from, double to, double frac) { return from + (to - from) * std::clamp(frac, 0.0, 1.0); }

}  // namespace

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::ride: return "ride";
    case ScenarioKind::crash: return "crash";
    case ScenarioKind::wobble: return "wobble";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "ride") return ScenarioKind::ride;
  if (lower == "crash") return ScenarioKind::crash;
  if (lower == "wobble") return ScenarioKind::wobble;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

void Scenario::validate(std::int64_t sample_period_ms) const {
  if (sample_period_ms <= 0) throw ConfigError("sample period must be positive");
  if (!std::isfinite(duration_s) || duration_s <= 0) throw ConfigError("duration must be positive");
  if (crash_at_s && (!std::isfinite(*crash_at_s) || *crash_at_s < 0 || *crash_at_s >= duration_s))
    throw ConfigError("crash_at must lie in [0, duration)");
  if (name == ScenarioKind::crash && !crash_at_s && kDefaultCrashAtS >= duration_s)
    throw ConfigError("duration too short for the default crash instant");
  if (name == ScenarioKind::wobble) {
    const auto start = ceil_to_grid(to_ms(crash_at_s.value_or(kDefaultCrashAtS)), sample_period_ms);
    if (start + kWobbleLengthMs + sample_period_ms >= to_ms(duration_s))
      throw ConfigError("duration too short to contain the wobble and its recovery");
  }
}

RideTrace generate(const Scenario& scenario, std::int64_t sample_period_ms) {
  scenario.validate(sample_period_ms);
  Rng tilt_rng(scenario.seed);
  Rng phy_rng(scenario.seed ^ 0x9E3779B97F4A7C15ULL);
  Rng gps_rng(scenario.seed ^ 0xD1B54A32D192ED03ULL);

  const std::int64_t duration_ms = to_ms(scenario.duration_s);
  const std::int64_t event_ms =
      scenario.name == ScenarioKind::ride
          ? duration_ms
          : ceil_to_grid(to_ms(scenario.crash_at_s.value_or(kDefaultCrashAtS)), sample_period_ms);
  const bool crash = scenario.name == ScenarioKind::crash;
  const bool wobble = scenario.name == ScenarioKind::wobble;

  RideTrace trace;

  for (std::int64_t t = 0; t < duration_ms; t += sample_period_ms) {
    TiltRecord s;
    s.ax = tilt_rng.uniform(-kRideNoiseCounts, kRideNoiseCounts);
    s.ay = tilt_rng.uniform(-kRideNoiseCounts, kRideNoiseCounts);
    s.az = tilt_rng.uniform(236, 276);
    if (crash && t >= event_ms) {
      s.ay = tilt_rng.uniform(-260, -240);
      s.az = tilt_rng.uniform(-30, 30);
    } else if (wobble && t >= event_ms && t <= event_ms + kWobbleLengthMs) {
      s.ay = tilt_rng.uniform(-260, -210);
    }
    trace.push_back({t, s});
  }

  double lat = kBaseLatitude;
  double lon = kBaseLongitude;
  std::uint16_t seq = 0;
  for (std::int64_t second = 0; second * 1000 < duration_ms; ++second) {
    const std::int64_t base = second * 1000;

    if (base + kPhyOffsetMs < duration_ms) {
      const std::int64_t t = base + kPhyOffsetMs;
      double pulse = 75.0 + phy_rng.uniform(-50, 50) / 10.0;
      double spo2 = 97.0 + phy_rng.uniform(-10, 10) / 10.0;
      if (crash && t >= event_ms) {
        const double frac = static_cast<double>(t - event_ms) / kRampMs;
        pulse = lerp(pulse, 110.0, frac);
        spo2 = lerp(spo2, 92.0, frac);
      }
      telemetry::TelemetryFrame f;
      f.seq = seq++;
      f.pulse_bpm = std::round(pulse * 10.0) / 10.0;
      f.spo2_pct = std::round(spo2 * 10.0) / 10.0;
      f.battery_mv = static_cast<std::int32_t>(3700 - second / 60);
      auto line = telemetry::encode_frame(f);
      line.pop_back();
      trace.push_back({t, PhyRecord{std::move(line)}});
    }

    lat += gps_rng.uniform(-5, 5) * 1e-6;
    lon += gps_rng.uniform(-5, 5) * 1e-6;
    nmea::GeoFix fix;
    fix.latitude_deg = lat;
    fix.longitude_deg = lon;
    fix.quality = nmea::FixQuality::gps_fix;
    fix.satellites = 8;
    // Sentence time equals its trace time, so UTC annotations are exact.
    auto stamped = [&](std::int64_t t) {
      fix.timestamp_utc = nmea::UtcTime::from_millis_of_day(kTraceEpochUtc.millis_of_day() + t);
      return fix;
    };
    if (base + kGgaOffsetMs < duration_ms)
      trace.push_back({base + kGgaOffsetMs, NmeaRecord{nmea::format_gga(stamped(base + kGgaOffsetMs))}});
    if (second % kRmcEverySeconds == 0 && base + kRmcOffsetMs < duration_ms)
      trace.push_back({base + kRmcOffsetMs, NmeaRecord{nmea::format_rmc(stamped(base + kRmcOffsetMs))}});
  }

  std::stable_sort(trace.begin(), trace.end(),
                   [](const TraceRecord& a, const TraceRecord& b) { return a.t_ms < b.t_ms; });
  return trace;
}

}  // namespace ridesafe::sim
