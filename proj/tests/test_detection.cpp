#include <random>
#include <vector>

#include "doctest.h"
#include "ridesafe/detection.hpp"
#include "ridesafe/errors.hpp"

using namespace ridesafe;
using namespace ridesafe::detection;

namespace {

const DetectorConfig kDefault{};

struct Run {
  DetectorState state;
  std::vector<AccidentEvent> events;
  std::vector<DetectorState> states;
};

Run run_trace(const std::vector<TiltSample>& samples, const DetectorConfig& cfg = kDefault) {
  Run r;
  for (const auto& s : samples) {
    auto t = ingest_sample(r.state, s, cfg);
    r.state = t.state;
    r.states.push_back(t.state);
    if (t.event) r.events.push_back(*t.event);
  }
  return r;
}

std::vector<TiltSample> random_trace(std::mt19937& rng, int n, std::int64_t period = 100) {
  std::vector<TiltSample> out;
  std::uniform_int_distribution<int> counts(-512, 512);
  std::uniform_int_distribution<int> mode(0, 9);
  int sticky = 0;
  for (int i = 0; i < n; ++i) {
    // Long unstable stretches so confirmations actually happen.
    if (mode(rng) == 0) sticky = sticky ? 0 : 1;
    TiltSample s{i * period, counts(rng) / 3, counts(rng) / 3, counts(rng)};
    if (sticky) s.ay = -300;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("is_unstable examples") {
  CHECK_FALSE(is_unstable({0, 0, 0, 256}, kDefault));
  CHECK(is_unstable({0, 10, -250, 0}, kDefault));
  CHECK_FALSE(is_unstable({0, 200, 200, 0}, kDefault));
  CHECK_FALSE(is_unstable({0, -200, -200, 0}, kDefault));
  CHECK(is_unstable({0, 201, 0, 0}, kDefault));
  CHECK(is_unstable({0, 0, -201, 0}, kDefault));
  CHECK_FALSE(is_unstable({0, 0, 0, 512}, kDefault));
}

TEST_CASE("tilt_angle_deg anchors") {
  CHECK(tilt_angle_deg(0) == 90.0);
  CHECK(tilt_angle_deg(200) == 20.0);
  CHECK(tilt_angle_deg(-200) == 160.0);
  CHECK(tilt_angle_deg(512) == 0.0);
  CHECK(tilt_angle_deg(-512) == 180.0);
  CHECK_THROWS_AS(tilt_angle_deg(513), DomainError);
  CHECK_THROWS_AS(tilt_angle_deg(-513), DomainError);
}

TEST_CASE("tilt angle is antisymmetric about 90 and decreasing") {
  for (int r = -512; r <= 512; ++r) CHECK(tilt_angle_deg(r) + tilt_angle_deg(-r) == doctest::Approx(180.0).epsilon(1e-12));
  // Strict inside the unclamped span, non-increasing across the whole domain.
  for (int r = -257; r < 257; ++r) CHECK(tilt_angle_deg(r + 1) < tilt_angle_deg(r));
  for (int r = -512; r < 512; ++r) CHECK(tilt_angle_deg(r + 1) <= tilt_angle_deg(r));
}

TEST_CASE("ingest_sample examples") {
  DetectorState fresh;
  auto t1 = ingest_sample(fresh, {1000, 0, -250, 0}, kDefault);
  CHECK(t1.state.mode == Mode::suspected);
  CHECK(t1.state.suspected_since_ms == 1000);
  CHECK_FALSE(t1.event);

  auto t2 = ingest_sample(t1.state, {6000, 0, -240, 0}, kDefault);
  CHECK(t2.state.mode == Mode::confirmed);
  REQUIRE(t2.event);
  CHECK(t2.event->detected_at_ms == 1000);
  CHECK(t2.event->confirmed_at_ms == 6000);
  CHECK(t2.event->trigger_axis == Axis::y);
  CHECK(t2.event->trigger_value == -240);

  auto t3 = ingest_sample(t1.state, {3000, 0, 0, 0}, kDefault);
  CHECK(t3.state.mode == Mode::monitoring);
  CHECK_FALSE(t3.state.suspected_since_ms);
  CHECK_FALSE(t3.event);
}

TEST_CASE("confirmation needs the full window") {
  auto r = run_trace({{1000, 0, -250, 0}, {5999, 0, -250, 0}});
  CHECK(r.state.mode == Mode::suspected);
  CHECK(r.events.empty());
}

TEST_CASE("trigger axis reports X, Y or BOTH") {
  auto axis_of = [](int ax, int ay) {
    auto r = run_trace({{0, ax, ay, 0}, {5000, ax, ay, 0}});
    REQUIRE(r.events.size() == 1);
    return r.events[0];
  };
  CHECK(axis_of(300, 0).trigger_axis == Axis::x);
  CHECK(axis_of(300, 0).trigger_value == 300);
  CHECK(axis_of(0, 300).trigger_axis == Axis::y);
  const auto both = axis_of(-400, 300);
  CHECK(both.trigger_axis == Axis::both);
  CHECK(both.trigger_value == -400);
}

TEST_CASE("CONFIRMED is terminal") {
  auto r = run_trace({{0, 0, -300, 0}, {5000, 0, -300, 0}, {5100, 0, 0, 0}, {5200, 0, -300, 0}, {20000, 0, -300, 0}});
  CHECK(r.state.mode == Mode::confirmed);
  CHECK(r.events.size() == 1);
}

TEST_CASE("rearm returns a fresh monitoring state") {
  auto r = run_trace({{0, 0, -300, 0}, {5000, 0, -300, 0}});
  const auto armed = rearm(r.state);
  CHECK(armed.mode == Mode::monitoring);
  CHECK_FALSE(armed.suspected_since_ms);
  CHECK(armed.last_sample == r.state.last_sample);
  CHECK_THROWS_AS(ingest_sample(armed, {5000, 0, 0, 0}, kDefault), SequencingError);
}

TEST_CASE("sequencing and domain errors") {
  auto t = ingest_sample({}, {100, 0, 0, 0}, kDefault);
  CHECK_THROWS_AS(ingest_sample(t.state, {100, 0, 0, 0}, kDefault), SequencingError);
  CHECK_THROWS_AS(ingest_sample(t.state, {50, 0, 0, 0}, kDefault), SequencingError);
  CHECK_THROWS_AS(ingest_sample({}, {-1, 0, 0, 0}, kDefault), SequencingError);
  CHECK_THROWS_AS(ingest_sample({}, {0, 600, 0, 0}, kDefault), DomainError);
  CHECK_THROWS_AS(ingest_sample({}, {0, 0, 0, -513}, kDefault), DomainError);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(kDefault.validate());
  DetectorConfig c;
  c.threshold_counts = 512;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.threshold_counts = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.confirm_window_ms = 50;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.sample_period_ms = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("property: az never influences transitions") {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> az(-512, 512);
  for (int trial = 0; trial < 200; ++trial) {
    auto trace = random_trace(rng, 200);
    auto other = trace;
    for (auto& s : other) s.az = az(rng);
    const auto a = run_trace(trace);
    const auto b = run_trace(other);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i) {
      CHECK(a.states[i].mode == b.states[i].mode);
      CHECK(a.states[i].suspected_since_ms == b.states[i].suspected_since_ms);
    }
    CHECK(a.events == b.events);
  }
}

TEST_CASE("property: at most one event per unstable episode, none without excursions") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto trace = random_trace(rng, 400);
    // Re-arm on every stable sample so each unstable episode is judged alone.
    DetectorState state;
    int events_in_episode = 0;
    for (const auto& s : trace) {
      if (!is_unstable(s, kDefault)) {
        if (state.mode == Mode::confirmed) state = rearm(state);
        events_in_episode = 0;
      }
      auto t = ingest_sample(state, s, kDefault);
      state = t.state;
      if (t.event) ++events_in_episode;
      CHECK(events_in_episode <= 1);
    }
  }
  std::vector<TiltSample> calm;
  for (int i = 0; i < 1000; ++i) calm.push_back({i * 100, (i * 37) % 401 - 200, (i * 91) % 401 - 200, 0});
  CHECK(run_trace(calm).events.empty());
}

TEST_CASE("property: an unstable run of duration d confirms iff d >= window") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::int64_t> period_dist(1, 700);
  std::uniform_int_distribution<int> len_dist(1, 120);
  for (int trial = 0; trial < 500; ++trial) {
    DetectorConfig cfg;
    cfg.sample_period_ms = period_dist(rng);
    const int n = len_dist(rng);
    std::vector<TiltSample> trace;
    std::int64_t t = 0;
    trace.push_back({t, 0, 0, 0});
    for (int i = 0; i < n; ++i) trace.push_back({t += cfg.sample_period_ms, 0, 250, 0});
    trace.push_back({t + cfg.sample_period_ms, 0, 0, 0});
    const std::int64_t d = (n - 1) * cfg.sample_period_ms;
    const auto r = run_trace(trace, cfg);
    CAPTURE(cfg.sample_period_ms);
    CAPTURE(n);
    CHECK(r.events.size() == (d >= cfg.confirm_window_ms ? 1u : 0u));
    for (const auto& e : r.events) {
      CHECK(e.confirmed_at_ms - e.detected_at_ms >= cfg.confirm_window_ms);
      CHECK(e.confirmed_at_ms - e.detected_at_ms < cfg.confirm_window_ms + cfg.sample_period_ms);
      CHECK(std::abs(e.trigger_value) > cfg.threshold_counts);
    }
  }
}

TEST_CASE("property: a stable sample during SUSPECTED resets completely") {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> stable(-200, 200), unstable(201, 512), gap(1, 4000);
  for (int trial = 0; trial < 500; ++trial) {
    DetectorState s;
    std::int64_t t = gap(rng);
    s = ingest_sample(s, {t, 0, -unstable(rng), 0}, kDefault).state;
    REQUIRE(s.mode == Mode::suspected);
    const TiltSample calm{t + gap(rng), stable(rng), stable(rng), 0};
    auto after = ingest_sample(s, calm, kDefault).state;
    DetectorState expected;
    expected.last_sample = calm;
    CHECK(after == expected);
  }
}

TEST_CASE("property: identical inputs give identical event sequences") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto trace = random_trace(rng, 300);
    CHECK(run_trace(trace).events == run_trace(trace).events);
  }
}

TEST_CASE("snapshot_context attaches fresh data unchanged") {
  AccidentEvent e{1000, 6000, Axis::y, -250, std::nullopt, std::nullopt};
  const nmea::GeoFix fix{23.7808, 90.4219, nmea::FixQuality::gps_fix, std::nullopt, std::nullopt};
  const telemetry::PhysioReading physio{82, 97, 4000, false};
  const auto out = snapshot_context(e, fix, physio, 6000);
  REQUIRE(out.fix);
  CHECK(*out.fix == fix);
  REQUIRE(out.physio);
  CHECK(out.physio->pulse_bpm == 82);
  CHECK(out.physio->spo2_pct == 97);
  CHECK_FALSE(out.physio->stale);
}

TEST_CASE("snapshot_context flags vitals older than the staleness bound") {
  AccidentEvent e{1000, 20000, Axis::y, -250, std::nullopt, std::nullopt};
  auto aged = [&](std::int64_t age_ms) {
    return snapshot_context(e, std::nullopt, telemetry::PhysioReading{82, 97, 20000 - age_ms, false}, 20000)
        .physio->stale;
  };
  CHECK(aged(15000));
  CHECK(aged(10001));
  CHECK_FALSE(aged(10000));
  CHECK_FALSE(aged(9999));
  CHECK_FALSE(aged(2000));
}

TEST_CASE("snapshot_context leaves missing data absent") {
  AccidentEvent e{1000, 6000, Axis::y, -250, std::nullopt, std::nullopt};
  const auto out = snapshot_context(e, std::nullopt, std::nullopt, 6000);
  CHECK_FALSE(out.fix);
  CHECK_FALSE(out.physio);
}
