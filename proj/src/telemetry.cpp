#include "ridesafe/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ridesafe/checksum.hpp"
#include "ridesafe/errors.hpp"
#include "ridesafe/text.hpp"

namespace ridesafe::telemetry {

namespace {

bool pulse_in_range(double v) { return std::isfinite(v) && v >= kPulseMinBpm && v <= kPulseMaxBpm; }
bool spo2_in_range(double v) { return std::isfinite(v) && v >= kSpo2MinPct && v <= kSpo2MaxPct; }

}  // namespace

const char* to_string(FrameOutcome o) {
  switch (o) {
    case FrameOutcome::accepted: return "accepted";
    case FrameOutcome::duplicate: return "duplicate";
    case FrameOutcome::framing_error: return "framing";
    case FrameOutcome::checksum_error: return "checksum";
    case FrameOutcome::range_error: return "range";
  }
  return "?";
}

std::string encode_frame(const TelemetryFrame& frame) {
  if (!pulse_in_range(frame.pulse_bpm)) throw EncodeError("pulse out of range: " + text::fixed(frame.pulse_bpm, 1));
  if (!spo2_in_range(frame.spo2_pct)) throw EncodeError("SpO2 out of range: " + text::fixed(frame.spo2_pct, 1));
  if (frame.battery_mv < 0 || frame.battery_mv > kBatteryMaxMv)
    throw EncodeError("battery millivolts out of range: " + std::to_string(frame.battery_mv));

  std::string payload = "PHY," + std::to_string(frame.seq) + ',' + text::fixed(frame.pulse_bpm, 1) + ',' +
                        text::fixed(frame.spo2_pct, 1) + ',' + std::to_string(frame.battery_mv);
  const auto ck = to_hex2(xor_fold(payload));
  return payload + '*' + ck + '\n';
}

TelemetryFrame decode_frame(std::string_view line) {
  if (line.ends_with('\n')) line.remove_suffix(1);
  const std::size_t n = line.size();
  if (n < 4 || line[n - 3] != '*') throw FramingError("missing '*' checksum delimiter");
  const auto stored = parse_hex2(line.substr(n - 2));
  if (!stored) throw FramingError("checksum is not two uppercase hex digits");

  const auto payload = line.substr(0, n - 3);
  if (xor_fold(payload) != *stored) throw ChecksumError("checksum mismatch");
  for (char c : payload)
    if (c < 0x20 || c > 0x7E || c == '*') throw FramingError("illegal byte in frame");

  const auto parts = text::split(payload, ',');
  if (parts.size() != 5 || parts[0] != "PHY") throw FramingError("expected PHY frame with 4 fields");

  TelemetryFrame f;
  unsigned long long seq = 0;
  if (!text::parse_uint(parts[1], seq) || seq > 0xFFFF) throw FramingError("malformed sequence number");
  f.seq = static_cast<std::uint16_t>(seq);
  if (!text::parse_decimal(parts[2], f.pulse_bpm)) throw FramingError("malformed pulse field");
  if (!text::parse_decimal(parts[3], f.spo2_pct)) throw FramingError("malformed SpO2 field");
  long long mv = 0;
  if (!text::parse_int(parts[4], mv)) throw FramingError("malformed battery field");

  if (!pulse_in_range(f.pulse_bpm)) throw RangeError("pulse out of range");
  if (!spo2_in_range(f.spo2_pct)) throw RangeError("SpO2 out of range");
  if (mv < 0 || mv > kBatteryMaxMv) throw RangeError("battery millivolts out of range");
  f.battery_mv = static_cast<std::int32_t>(mv);
  return f;
}

PhysioReading smooth(std::span<const PhysioReading> history) {
  if (history.empty()) throw NoData("no physio readings received");
  const auto window = history.last(std::min(history.size(), kSmoothingWindow));
  double pulse = 0.0, spo2 = 0.0;
  for (const auto& r : window) {
    pulse += r.pulse_bpm;
    spo2 += r.spo2_pct;
  }
  const auto k = static_cast<double>(window.size());
  PhysioReading out = history.back();
  out.pulse_bpm = pulse / k;
  out.spo2_pct = spo2 / k;
  return out;
}

std::array<std::string, 2> format_display(const std::optional<PhysioReading>& reading) {
  if (!reading) return {"PULSE -- bpm", "SpO2 -- %"};
  char pulse[32], spo2[40];
  std::snprintf(pulse, sizeof pulse, "PULSE %ld bpm", std::lround(reading->pulse_bpm));
  std::snprintf(spo2, sizeof spo2, "SpO2 %ld %%%s", std::lround(reading->spo2_pct), reading->stale ? " (STALE)" : "");
  return {pulse, spo2};
}

bool is_stale(const PhysioReading& reading, std::int64_t now_ms, std::int64_t staleness_ms) {
  return now_ms - reading.received_at_ms > staleness_ms;
}

void TelemetryLink::push(std::string line, std::int64_t arrived_at_ms) {
  fifo_.emplace_back(std::move(line), arrived_at_ms);
}

std::vector<TelemetryLink::Drained> TelemetryLink::drain() {
  std::vector<Drained> out;
  out.reserve(fifo_.size());
  while (!fifo_.empty()) {
    auto [line, at] = std::move(fifo_.front());
    fifo_.pop_front();
    Drained d{at, FrameOutcome::accepted, std::nullopt, 0};
    try {
      const auto frame = decode_frame(line);
      if (last_seq_) {
        const auto delta = static_cast<std::uint16_t>(frame.seq - *last_seq_);
        if (delta == 0) {
          ++counters_.duplicates;
          d.outcome = FrameOutcome::duplicate;
          out.push_back(std::move(d));
          continue;
        }
        d.gap = delta - 1u;
        counters_.lost_frames += d.gap;
      }
      last_seq_ = frame.seq;
      battery_mv_ = frame.battery_mv;
      history_.push_back(PhysioReading{frame.pulse_bpm, frame.spo2_pct, at, false});
      if (history_.size() > kSmoothingWindow) history_.pop_front();
      ++counters_.accepted;
      d.frame = frame;
    } catch (const ChecksumError&) {
      ++counters_.checksum_errors;
      d.outcome = FrameOutcome::checksum_error;
    } catch (const RangeError&) {
      ++counters_.range_errors;
      d.outcome = FrameOutcome::range_error;
    } catch (const FramingError&) {
      ++counters_.framing_errors;
      d.outcome = FrameOutcome::framing_error;
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::optional<PhysioReading> TelemetryLink::latest(std::int64_t now_ms, std::int64_t staleness_ms) const {
  if (history_.empty()) return std::nullopt;
  const std::vector<PhysioReading> window(history_.begin(), history_.end());
  auto r = smooth(window);
  r.stale = is_stale(r, now_ms, staleness_ms);
  return r;
}

}  // namespace ridesafe::telemetry
