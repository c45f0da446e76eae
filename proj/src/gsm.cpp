#include "ridesafe/gsm.hpp"

#include <cmath>
#include <functional>
#include <regex>

#include "json.hpp"
#include "ridesafe/errors.hpp"
#include "ridesafe/text.hpp"

namespace ridesafe::gsm {

namespace {

constexpr std::string_view kOk = "\r\nOK\r\n";
constexpr std::string_view kErrorReply = "\r\nERROR\r\n";
constexpr std::string_view kPrompt = "\r\n> ";

bool reply_ok(const Reply& r, std::string_view expect) {
  return r.bytes.find(expect) != std::string::npos && r.bytes.find("ERROR") == std::string::npos;
}

std::optional<int> parse_message_ref(std::string_view reply) {
  const auto pos = reply.find("+CMGS: ");
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = reply.substr(pos + 7);
  const auto end = rest.find('\r');
  unsigned long long ref = 0;
  if (!text::parse_uint(rest.substr(0, end), ref) || ref > 255) return std::nullopt;
  return static_cast<int>(ref);
}

std::string vitals_line(const char* label, const std::optional<telemetry::PhysioReading>& p, bool pulse,
                        const char* unit) {
  std::string line = std::string(label) + ": ";
  if (!p) return line + "-- " + unit;
  line += std::to_string(std::lround(pulse ? p->pulse_bpm : p->spo2_pct));
  line += ' ';
  line += unit;
  if (p->stale) line += " (STALE)";
  return line;
}

}  // namespace

const char* to_string(SessionStep s) {
  switch (s) {
    case SessionStep::at: return "AT";
    case SessionStep::cmgf: return "AT+CMGF";
    case SessionStep::cmgs: return "AT+CMGS";
    case SessionStep::body: return "BODY";
  }
  return "?";
}

std::string maps_link(const nmea::GeoFix& fix) {
  if (!fix.has_position()) throw NoLocation("no GPS fix");
  return "https://maps.google.com/?q=" + text::fixed(fix.latitude_deg, 6) + ',' + text::fixed(fix.longitude_deg, 6);
}

std::string compose_sms(const detection::AccidentEvent& event) {
  std::string body = "ACCIDENT DETECTED\n";
  body += vitals_line("Pulse", event.physio, true, "bpm") + '\n';
  body += vitals_line("SpO2", event.physio, false, "%") + '\n';
  body += "Loc: ";
  try {
    body += event.fix ? maps_link(*event.fix) : "UNKNOWN";
  } catch (const NoLocation&) {
    body += "UNKNOWN";
  }
  return body;
}

SmsFields parse_sms_body(std::string_view body) {
  const auto lines = text::split(body, '\n');
  if (lines.size() != 4) throw FieldError("SMS body must have exactly four lines");
  if (lines[0] != "ACCIDENT DETECTED") throw FieldError("missing headline");

  static const std::regex pulse_re(R"(Pulse: (--|\d+) bpm( \(STALE\))?)");
  static const std::regex spo2_re(R"(SpO2: (--|\d+) %( \(STALE\))?)");
  static const std::regex loc_re(R"(Loc: (UNKNOWN|https://maps\.google\.com/\?q=(-?\d+\.\d{6}),(-?\d+\.\d{6})))");

  SmsFields out;
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(lines[1].begin(), lines[1].end(), m, pulse_re)) throw FieldError("malformed pulse line");
  if (m[1] != "--") out.pulse_bpm = std::stol(m[1].str());
  out.pulse_stale = m[2].matched;
  if (!out.pulse_bpm && out.pulse_stale) throw FieldError("placeholder marked stale");

  if (!std::regex_match(lines[2].begin(), lines[2].end(), m, spo2_re)) throw FieldError("malformed SpO2 line");
  if (m[1] != "--") out.spo2_pct = std::stol(m[1].str());
  out.spo2_stale = m[2].matched;
  if (!out.spo2_pct && out.spo2_stale) throw FieldError("placeholder marked stale");

  if (!std::regex_match(lines[3].begin(), lines[3].end(), m, loc_re)) throw FieldError("malformed location line");
  if (m[2].matched) {
    out.latitude_deg = std::stod(m[2].str());
    out.longitude_deg = std::stod(m[3].str());
  }
  return out;
}

bool is_e164(std::string_view number) {
  if (number.size() < 9 || number.size() > 16 || number.front() != '+') return false;
  for (char c : number.substr(1))
    if (c < '0' || c > '9') return false;
  return true;
}

std::optional<std::size_t> gsm7_length(std::string_view text) {
  std::size_t septets = 0;
  for (char c : text) {
    if (c == '\n' || c == '\r') {
      septets += 1;
    } else if (c < 0x20 || c > 0x7E || c == '`') {
      return std::nullopt;
    } else if (std::string_view("^{}\\[~]|").find(c) != std::string_view::npos) {
      septets += 2;
    } else {
      septets += 1;
    }
  }
  return septets;
}

void SmsRequest::validate() const {
  if (recipients.empty()) throw DomainError("at least one recipient is required");
  for (const auto& r : recipients)
    if (!is_e164(r)) throw DomainError("recipient is not an E.164 number: " + r);
  if (body.empty()) throw DomainError("empty SMS body");
  const auto len = gsm7_length(body);
  if (!len) throw DomainError("SMS body is not GSM-7 encodable");
  if (*len > kMaxSegmentSeptets) throw DomainError("SMS body exceeds one segment");
}

std::vector<AtExchange> session_plan(const std::string& number, const std::string& body, std::int64_t timeout_ms,
                                     int attempts_allowed) {
  return {
      {"AT\r", "OK", timeout_ms, attempts_allowed},
      {"AT+CMGF=1\r", "OK", timeout_ms, attempts_allowed},
      {"AT+CMGS=\"" + number + "\"\r", ">", timeout_ms, attempts_allowed},
      {body + kCtrlZ, "+CMGS:", timeout_ms, attempts_allowed},
  };
}

std::string to_jsonl(const TranscriptEntry& entry) {
  nlohmann::ordered_json j;
  j["t_ms"] = entry.t_ms;
  j["direction"] = entry.direction == Direction::tx ? "tx" : "rx";
  j["bytes"] = entry.bytes;
  return j.dump();
}

TranscriptEntry transcript_entry_from_jsonl(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    TranscriptEntry e;
    e.t_ms = j.at("t_ms").get<std::int64_t>();
    const auto dir = j.at("direction").get<std::string>();
    if (dir != "tx" && dir != "rx") throw FieldError("bad direction: " + dir);
    e.direction = dir == "tx" ? Direction::tx : Direction::rx;
    e.bytes = j.at("bytes").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw FieldError(std::string("malformed transcript entry: ") + ex.what());
  }
}

ModemEmulator::ModemEmulator(ModemScript script)
    : script_(std::move(script)), fault_matches_(script_.faults.size(), 0), next_ref_(script_.first_message_ref) {}

SessionStep ModemEmulator::classify(std::string_view bytes) const {
  if (pending_number_) return SessionStep::body;
  if (bytes.starts_with("AT+CMGF")) return SessionStep::cmgf;
  if (bytes.starts_with("AT+CMGS")) return SessionStep::cmgs;
  return SessionStep::at;
}

const Fault* ModemEmulator::active_fault(SessionStep step) {
  const Fault* hit = nullptr;
  for (std::size_t i = 0; i < script_.faults.size(); ++i) {
    const auto& f = script_.faults[i];
    if (f.step != step) continue;
    const int n = fault_matches_[i]++;
    if (!hit && n >= f.skip && (f.times < 0 || n < f.skip + f.times)) hit = &f;
  }
  return hit;
}

std::optional<Reply> ModemEmulator::transact(std::string_view bytes, std::int64_t t_ms, std::int64_t deadline_ms) {
  transcript_.push_back({t_ms, Direction::tx, std::string(bytes)});

  const SessionStep step = classify(bytes);
  const bool in_body = step == SessionStep::body;
  const Fault* fault = active_fault(step);

  std::int64_t latency = in_body ? script_.submit_latency_ms : script_.response_latency_ms;
  std::string reply;
  std::function<void()> commit = [] {};

  if (fault && fault->kind == FaultKind::timeout) {
    if (in_body) pending_number_.reset();
    return std::nullopt;
  }
  if (fault && fault->kind == FaultKind::error) {
    if (in_body) pending_number_.reset();
    reply = kErrorReply;
    latency = script_.response_latency_ms;
  } else {
    if (fault) latency += fault->delay_ms;
    if (in_body) {
      if (!bytes.ends_with(kCtrlZ)) {
        pending_number_.reset();
        return std::nullopt;
      }
      const int ref = next_ref_;
      reply = "\r\n+CMGS: " + std::to_string(ref) + "\r\n" + std::string(kOk);
      commit = [this, ref, body = std::string(bytes.substr(0, bytes.size() - 1)), at = t_ms + latency] {
        outbox_.push_back({*pending_number_, body, ref, at});
        next_ref_ = (ref + 1) % 256;
        pending_number_.reset();
      };
    } else if (!bytes.ends_with('\r')) {
      return std::nullopt;
    } else if (bytes == "AT\r") {
      reply = kOk;
    } else if (bytes == "AT+CMGF=1\r" || bytes == "AT+CMGF=0\r") {
      reply = kOk;
      commit = [this, on = bytes == "AT+CMGF=1\r"] { text_mode_ = on; };
    } else if (bytes.starts_with("AT+CMGS=\"") && bytes.ends_with("\"\r")) {
      std::string number(bytes.substr(9, bytes.size() - 11));
      if (!text_mode_ || !is_e164(number)) {
        reply = kErrorReply;
      } else {
        reply = kPrompt;
        commit = [this, number] { pending_number_ = number; };
      }
    } else {
      reply = kErrorReply;
    }
  }

  const std::int64_t at = t_ms + latency;
  if (at > deadline_ms) {
    if (in_body) pending_number_.reset();
    return std::nullopt;
  }
  commit();
  transcript_.push_back({at, Direction::rx, reply});
  return Reply{reply, at};
}

TranscriptModem::TranscriptModem(Transcript recorded) : recorded_(std::move(recorded)) {}

std::optional<Reply> TranscriptModem::transact(std::string_view bytes, std::int64_t t_ms, std::int64_t deadline_ms) {
  if (cursor_ >= recorded_.size()) throw Error("transcript exhausted");
  const auto& tx = recorded_[cursor_];
  if (tx.direction != Direction::tx || tx.bytes != bytes || tx.t_ms != t_ms)
    throw Error("host diverged from recorded transcript at entry " + std::to_string(cursor_));
  ++cursor_;
  if (cursor_ < recorded_.size()) {
    const auto& rx = recorded_[cursor_];
    if (rx.direction == Direction::rx && rx.t_ms <= deadline_ms) {
      ++cursor_;
      return Reply{rx.bytes, rx.t_ms};
    }
  }
  return std::nullopt;
}

std::size_t DeliveryReport::delivered_count() const {
  std::size_t n = 0;
  for (const auto& r : results) n += r.delivered ? 1 : 0;
  return n;
}

DeliveryReport send_sms(const SmsRequest& request, Modem& modem, std::int64_t start_ms, const DriverConfig& config) {
  request.validate();
  if (config.attempts_allowed < 1) throw ConfigError("attempts_allowed must be >= 1");
  if (config.timeout_ms <= 0) throw ConfigError("timeout_ms must be positive");

  DeliveryReport report;
  report.started_at_ms = start_ms;
  std::int64_t now = start_ms;

  // One exchange; advances `now` to the reply or to the timeout deadline.
  auto exchange = [&](const AtExchange& ex, std::string& failure) -> std::optional<Reply> {
    auto reply = modem.transact(ex.command, now, now + ex.timeout_ms);
    if (!reply) {
      now += ex.timeout_ms;
      failure = "timeout";
      return std::nullopt;
    }
    now = reply->at_ms;
    if (!reply_ok(*reply, ex.expect)) {
      failure = reply->bytes.find("ERROR") != std::string::npos ? "ERROR" : "unexpected reply";
      return std::nullopt;
    }
    return reply;
  };

  for (const auto& number : request.recipients) {
    const auto plan = session_plan(number, request.body, config.timeout_ms, config.attempts_allowed);
    RecipientResult result;
    result.number = number;

    for (std::size_t i = 0; i < plan.size(); ++i) {
      const auto step = static_cast<SessionStep>(i);
      const auto& ex = plan[i];
      std::string failure;
      bool done = false;
      int attempts = 0;
      while (!done && attempts < ex.attempts_allowed) {
        ++attempts;
        // A failed body submission abandons the prompt; reopen it first.
        if (step == SessionStep::body && attempts > 1 && !exchange(plan[2], failure)) continue;
        if (auto reply = exchange(ex, failure)) {
          done = true;
          if (step == SessionStep::body) result.message_ref = parse_message_ref(reply->bytes);
        }
      }
      if (!done) {
        result.failed_step = step;
        result.attempts_on_failed_step = attempts;
        result.failure = failure;
        break;
      }
    }
    result.delivered = !result.failed_step;
    result.finished_at_ms = now;
    report.results.push_back(std::move(result));
  }
  report.finished_at_ms = now;
  return report;
}

}  // namespace ridesafe::gsm
