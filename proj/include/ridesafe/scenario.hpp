#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ridesafe/nmea.hpp"
#include "ridesafe/trace.hpp"

namespace ridesafe::sim {

enum class ScenarioKind { ride, crash, wobble };

const char* to_string(ScenarioKind k);
// Accepts "ride", "crash", "wobble" (case-insensitive). Throws ConfigError.
ScenarioKind scenario_kind_from_string(std::string_view name);

struct Scenario {
  ScenarioKind name = ScenarioKind::ride;
  double duration_s = 60.0;
  std::uint64_t seed = 0;
  // Crash instant for CRASH, excursion start for WOBBLE. Defaults to 10 s.
  std::optional<double> crash_at_s;

  // Throws ConfigError.
  void validate(std::int64_t sample_period_ms = 100) const;
};

inline constexpr double kDefaultCrashAtS = 10.0;
inline constexpr std::int64_t kWobbleLengthMs = 3000;
inline constexpr int kRideNoiseCounts = 120;

// Trace t=0 maps to this UTC time in the generated GPS sentences, so a crash
// at 10 s lands at 23:05:47.
inline const nmea::UtcTime kTraceEpochUtc{23, 5, 37, 0};
inline constexpr double kBaseLatitude = 23.780800;
inline constexpr double kBaseLongitude = 90.421900;

// Deterministic for a given scenario and sample period: the generator uses
// its own integer distributions on top of mt19937_64, whose output sequence
// is fixed by the standard.
RideTrace generate(const Scenario& scenario, std::int64_t sample_period_ms = 100);

}  // namespace ridesafe::sim
