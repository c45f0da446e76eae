#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ridesafe/detection.hpp"
#include "ridesafe/nmea.hpp"

namespace ridesafe::gsm {

inline constexpr std::size_t kMaxSegmentSeptets = 160;
inline constexpr char kCtrlZ = '\x1A';

// "https://maps.google.com/?q=<lat>,<lon>" at 6 decimals. Throws NoLocation
// for a NO_FIX fix.
std::string maps_link(const nmea::GeoFix& fix);

// Four '\n'-separated lines: headline, pulse, SpO2, location.
std::string compose_sms(const detection::AccidentEvent& event);

// Fields recovered from a composed body.
struct SmsFields {
  std::optional<long> pulse_bpm;
  bool pulse_stale = false;
  std::optional<long> spo2_pct;
  bool spo2_stale = false;
  std::optional<double> latitude_deg;
  std::optional<double> longitude_deg;

  bool operator==(const SmsFields&) const = default;
};

// Line grammar inverse of compose_sms. Throws FieldError.
SmsFields parse_sms_body(std::string_view body);

bool is_e164(std::string_view number);

// Septet count in the GSM 03.38 default alphabet (extension characters
// count twice). nullopt if a character has no GSM-7 encoding. ASCII only.
std::optional<std::size_t> gsm7_length(std::string_view text);

struct SmsRequest {
  std::vector<std::string> recipients;
  std::string body;

  // Throws DomainError.
  void validate() const;
};

// One command/response step of the modem session.
struct AtExchange {
  std::string command;  // bytes sent, CR- or Ctrl-Z-terminated
  std::string expect;   // token that must appear in the reply
  std::int64_t timeout_ms = 10'000;
  int attempts_allowed = 3;
};

// AT, AT+CMGF=1, AT+CMGS="<number>", body+Ctrl-Z.
std::vector<AtExchange> session_plan(const std::string& number, const std::string& body,
                                     std::int64_t timeout_ms = 10'000, int attempts_allowed = 3);

enum class Direction { tx, rx };

struct TranscriptEntry {
  std::int64_t t_ms = 0;
  Direction direction = Direction::tx;
  std::string bytes;

  bool operator==(const TranscriptEntry&) const = default;
};

using Transcript = std::vector<TranscriptEntry>;

// {"t_ms":..,"direction":"tx"|"rx","bytes":".."} with JSON string escaping.
std::string to_jsonl(const TranscriptEntry& entry);
TranscriptEntry transcript_entry_from_jsonl(std::string_view line);

struct Reply {
  std::string bytes;
  std::int64_t at_ms = 0;
};

// Host-side view of a serial modem in virtual time. transact() delivers the
// bytes at t_ms and returns the reply if it arrives no later than
// deadline_ms.
class Modem {
 public:
  virtual ~Modem() = default;
  virtual std::optional<Reply> transact(std::string_view bytes, std::int64_t t_ms, std::int64_t deadline_ms) = 0;
};

enum class SessionStep { at, cmgf, cmgs, body };

const char* to_string(SessionStep s);

enum class FaultKind { timeout, error, delay };

// Applies to transmissions of `step`: the first `skip` matches pass
// untouched, then the next `times` matches are faulted (times < 0: all).
struct Fault {
  SessionStep step = SessionStep::cmgs;
  FaultKind kind = FaultKind::timeout;
  int skip = 0;
  int times = -1;
  std::int64_t delay_ms = 0;  // extra latency for FaultKind::delay
};

struct ModemScript {
  std::int64_t response_latency_ms = 100;
  std::int64_t submit_latency_ms = 2500;
  int first_message_ref = 1;
  std::vector<Fault> faults;
};

struct SubmittedMessage {
  std::string number;
  std::string body;
  int message_ref = 0;
  std::int64_t at_ms = 0;
};

// Scripted SIM800L in text mode, no command echo. Faulted or late replies
// leave the modem state untouched.
class ModemEmulator : public Modem {
 public:
  explicit ModemEmulator(ModemScript script = {});

  std::optional<Reply> transact(std::string_view bytes, std::int64_t t_ms, std::int64_t deadline_ms) override;

  const Transcript& transcript() const { return transcript_; }
  const std::vector<SubmittedMessage>& outbox() const { return outbox_; }

 private:
  SessionStep classify(std::string_view bytes) const;
  const Fault* active_fault(SessionStep step);

  ModemScript script_;
  Transcript transcript_;
  std::vector<SubmittedMessage> outbox_;
  std::vector<int> fault_matches_;
  bool text_mode_ = false;
  std::optional<std::string> pending_number_;
  int next_ref_;
};

// Answers from a recorded transcript. Throws Error if the host sends bytes
// that differ from the recording.
class TranscriptModem : public Modem {
 public:
  explicit TranscriptModem(Transcript recorded);

  std::optional<Reply> transact(std::string_view bytes, std::int64_t t_ms, std::int64_t deadline_ms) override;
  bool exhausted() const { return cursor_ == recorded_.size(); }

 private:
  Transcript recorded_;
  std::size_t cursor_ = 0;
};

struct DriverConfig {
  int attempts_allowed = 3;
  std::int64_t timeout_ms = 10'000;
};

struct RecipientResult {
  std::string number;
  bool delivered = false;
  std::optional<int> message_ref;
  std::optional<SessionStep> failed_step;
  int attempts_on_failed_step = 0;
  std::string failure;
  std::int64_t finished_at_ms = 0;

  bool operator==(const RecipientResult&) const = default;
};

struct DeliveryReport {
  std::vector<RecipientResult> results;
  std::int64_t started_at_ms = 0;
  std::int64_t finished_at_ms = 0;

  std::size_t delivered_count() const;
  bool operator==(const DeliveryReport&) const = default;
};

// Runs the AT session once per recipient, serially. A recipient whose step
// exhausts its attempts is reported failed and the next one is tried.
DeliveryReport send_sms(const SmsRequest& request, Modem& modem, std::int64_t start_ms,
                        const DriverConfig& config = {});

}  // namespace ridesafe::gsm
