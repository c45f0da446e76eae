#include "ridesafe/replay.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"
#include "ridesafe/errors.hpp"
#include "ridesafe/text.hpp"

namespace ridesafe::sim {

namespace {

using json = nlohmann::ordered_json;

double rounded(double v, int decimals) { return std::stod(text::fixed(v, decimals)); }

class Replayer {
 public:
  explicit Replayer(const ReplayOptions& options) : opt_(options), modem_(options.modem) {}

  ReplayResult run(const RideTrace& trace) {
    opt_.detector.validate();
    validate_trace(trace);

    auto& start = emit(0, "start");
    start["threshold_counts"] = opt_.detector.threshold_counts;
    start["confirm_window_ms"] = opt_.detector.confirm_window_ms;
    start["staleness_ms"] = opt_.detector.staleness_ms;
    start["rearm"] = opt_.rearm;
    start["contacts"] = opt_.contacts;

    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto& r = trace[i];
      if (const auto* tilt = std::get_if<TiltRecord>(&r.payload)) {
        drain_phy();
        on_tilt(r.t_ms, *tilt, i + 1);
      } else if (const auto* n = std::get_if<NmeaRecord>(&r.payload)) {
        const auto outcome = fixes_.ingest(n->line, r.t_ms);
        if (outcome != nmea::LineOutcome::fix && outcome != nmea::LineOutcome::no_fix) {
          auto& j = emit(r.t_ms, "drop");
          j["source"] = "nmea";
          j["reason"] = nmea::to_string(outcome);
        }
      } else {
        link_.push(std::get<PhyRecord>(r.payload).line, r.t_ms);
      }
      last_t_ = std::max(last_t_, r.t_ms);
    }
    drain_phy();

    result_.modem_transcript = modem_.transcript();
    result_.phy_counters = link_.counters();
    result_.nmea_counters = fixes_.counters();

    std::size_t delivered = 0;
    for (const auto& d : result_.deliveries) delivered += d.delivered_count();
    auto& end = emit(last_t_, "end");
    end["accidents"] = result_.accidents.size();
    end["sms_delivered"] = delivered;
    end["phy_accepted"] = result_.phy_counters.accepted;
    end["phy_dropped"] = result_.phy_counters.dropped();
    end["phy_lost"] = result_.phy_counters.lost_frames;
    end["nmea_accepted"] = result_.nmea_counters.accepted;
    end["nmea_dropped"] = result_.nmea_counters.dropped();
    end["exit_code"] = result_.exit_code();

    std::stable_sort(log_.begin(), log_.end(), [](const Entry& a, const Entry& b) { return a.t_ms < b.t_ms; });
    result_.transcript.reserve(log_.size());
    for (const auto& e : log_) result_.transcript.push_back(e.body.dump());
    return std::move(result_);
  }

 private:
  struct Entry {
    std::int64_t t_ms;
    json body;
  };

  // The returned reference is valid until the next emit().
  json& emit(std::int64_t t_ms, const char* event) {
    log_.push_back({t_ms, json::object()});
    auto& j = log_.back().body;
    j["t_ms"] = t_ms;
    j["event"] = event;
    last_t_ = std::max(last_t_, t_ms);
    return j;
  }

  void annotate_utc(json& j, const char* key, std::int64_t t_ms) const {
    if (const auto utc = fixes_.utc_at(t_ms)) j[key] = utc->to_string();
  }

  void drain_phy() {
    for (const auto& d : link_.drain()) {
      if (d.outcome != telemetry::FrameOutcome::accepted) {
        auto& j = emit(d.arrived_at_ms, "drop");
        j["source"] = "phy";
        j["reason"] = telemetry::to_string(d.outcome);
      }
      if (d.gap > 0) {
        auto& j = emit(d.arrived_at_ms, "phy_gap");
        j["lost"] = d.gap;
      }
    }
  }

  void on_tilt(std::int64_t t_ms, const TiltRecord& rec, std::size_t record_no) {
    const detection::TiltSample sample{t_ms, rec.ax, rec.ay, rec.az};
    if (opt_.rearm && state_.mode == detection::Mode::confirmed && !detection::is_unstable(sample, opt_.detector)) {
      state_ = detection::rearm(state_);
      emit(t_ms, "rearm");
      result_.transitions.push_back({t_ms, detection::Mode::confirmed, detection::Mode::monitoring});
    }

    detection::Transition next;
    try {
      next = detection::ingest_sample(state_, sample, opt_.detector);
    } catch (const Error& e) {
      throw TraceError(record_no, e.what());
    }
    if (next.state.mode != state_.mode) {
      auto& j = emit(t_ms, "state");
      j["from"] = detection::to_string(state_.mode);
      j["to"] = detection::to_string(next.state.mode);
      j["ax"] = rec.ax;
      j["ay"] = rec.ay;
      j["angle_x_deg"] = rounded(detection::tilt_angle_deg(rec.ax), 1);
      j["angle_y_deg"] = rounded(detection::tilt_angle_deg(rec.ay), 1);
      annotate_utc(j, "utc", t_ms);
      result_.transitions.push_back({t_ms, state_.mode, next.state.mode});
    }
    state_ = next.state;
    if (next.event) on_accident(*next.event);
  }

  void on_accident(detection::AccidentEvent event) {
    const auto now = event.confirmed_at_ms;
    const auto staleness = opt_.detector.staleness_ms;
    event = detection::snapshot_context(std::move(event), fixes_.latest(), link_.latest(now, staleness), now, staleness);

    auto& j = emit(now, "accident");
    j["detected_at_ms"] = event.detected_at_ms;
    j["confirmed_at_ms"] = event.confirmed_at_ms;
    annotate_utc(j, "utc_detected", event.detected_at_ms);
    annotate_utc(j, "utc_confirmed", event.confirmed_at_ms);
    j["trigger_axis"] = detection::to_string(event.trigger_axis);
    j["trigger_value"] = event.trigger_value;
    if (event.physio) {
      j["pulse_bpm"] = rounded(event.physio->pulse_bpm, 1);
      j["spo2_pct"] = rounded(event.physio->spo2_pct, 1);
      j["physio_stale"] = event.physio->stale;
    }
    if (event.fix && event.fix->has_position()) {
      j["latitude_deg"] = rounded(event.fix->latitude_deg, 6);
      j["longitude_deg"] = rounded(event.fix->longitude_deg, 6);
    }

    const auto body = gsm::compose_sms(event);
    emit(now, "sms_body")["body"] = body;
    result_.accidents.push_back(event);
    result_.sms_bodies.push_back(body);

    if (opt_.contacts.empty()) {
      emit(now, "sms_skipped")["reason"] = "no contacts configured";
      return;
    }

    const auto first_entry = modem_.transcript().size();
    const auto report = gsm::send_sms({opt_.contacts, body}, modem_, now, opt_.driver);
    const auto& modem_log = modem_.transcript();
    for (auto i = first_entry; i < modem_log.size(); ++i) {
      auto& a = emit(modem_log[i].t_ms, "at");
      a["direction"] = modem_log[i].direction == gsm::Direction::tx ? "tx" : "rx";
      a["bytes"] = modem_log[i].bytes;
    }
    for (const auto& r : report.results) {
      auto& s = emit(r.finished_at_ms, "sms_result");
      s["recipient"] = r.number;
      s["status"] = r.delivered ? "delivered" : "failed";
      if (r.message_ref) s["message_ref"] = *r.message_ref;
      if (r.failed_step) {
        s["failed_step"] = gsm::to_string(*r.failed_step);
        s["attempts"] = r.attempts_on_failed_step;
        s["failure"] = r.failure;
      }
      annotate_utc(s, "utc", r.finished_at_ms);
    }
    result_.deliveries.push_back(report);
  }

  const ReplayOptions& opt_;
  gsm::ModemEmulator modem_;
  nmea::FixTracker fixes_;
  telemetry::TelemetryLink link_;
  detection::DetectorState state_;
  std::vector<Entry> log_;
  std::int64_t last_t_ = 0;
  ReplayResult result_;
};

}  // namespace

ReplayResult replay(const RideTrace& trace, const ReplayOptions& options) { return Replayer(options).run(trace); }

void write_transcript(std::ostream& out, const ReplayResult& result) {
  for (const auto& line : result.transcript) out << line << '\n';
}

ReplayOptions apply_config_json(std::string_view json_text, ReplayOptions base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  auto positive_int = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) throw ConfigError(key + " must be a positive integer");
    return v.get<std::int64_t>();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "threshold_counts") {
      base.detector.threshold_counts = static_cast<int>(positive_int(value, key));
    } else if (key == "confirm_window_ms") {
      base.detector.confirm_window_ms = positive_int(value, key);
    } else if (key == "sample_period_ms") {
      base.detector.sample_period_ms = positive_int(value, key);
    } else if (key == "staleness_s") {
      if (!value.is_number() || !(value.get<double>() > 0)) throw ConfigError("staleness_s must be positive");
      base.detector.staleness_ms = std::llround(value.get<double>() * 1000.0);
    } else if (key == "retries") {
      base.driver.attempts_allowed = static_cast<int>(positive_int(value, key));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  base.detector.validate();
  return base;
}

}  // namespace ridesafe::sim
