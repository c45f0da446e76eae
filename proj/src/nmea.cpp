#include "ridesafe/nmea.hpp"

#include <cmath>
#include <cstdio>

#include "ridesafe/checksum.hpp"
#include "ridesafe/errors.hpp"
#include "ridesafe/text.hpp"

namespace ridesafe::nmea {

namespace {

constexpr std::int64_t kMillisPerDay = 24LL * 3600 * 1000;

bool is_upper_alnum(char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

std::optional<UtcTime> parse_time(std::string_view f) {
  if (f.empty()) return std::nullopt;
  const auto dot = f.find('.');
  const auto whole = f.substr(0, dot);
  unsigned long long hms = 0;
  if (whole.size() != 6 || !text::parse_uint(whole, hms)) throw FieldError("malformed UTC time field");
  UtcTime t;
  t.hour = static_cast<int>(hms / 10000);
  t.minute = static_cast<int>(hms / 100 % 100);
  t.second = static_cast<int>(hms % 100);
  if (t.hour > 23 || t.minute > 59 || t.second > 59) throw FieldError("UTC time out of range");
  if (dot != std::string_view::npos) {
    const auto frac = f.substr(dot + 1);
    unsigned long long ignored = 0;
    if (!text::parse_uint(frac, ignored)) throw FieldError("malformed UTC fraction");
    int ms = 0;
    for (std::size_t i = 0; i < 3; ++i) ms = ms * 10 + (i < frac.size() ? frac[i] - '0' : 0);
    t.millisecond = ms;
  }
  return t;
}

// ddmm.mmmm (latitude, 2 degree digits) or dddmm.mmmm (longitude, 3 digits).
double parse_coordinate(std::string_view value, std::string_view hemisphere, bool is_latitude) {
  const std::size_t degree_digits = is_latitude ? 2 : 3;
  const auto dot = value.find('.');
  const auto whole = value.substr(0, dot);
  if (whole.size() != degree_digits + 2) throw FieldError("malformed coordinate field");
  unsigned long long degrees = 0;
  if (!text::parse_uint(whole.substr(0, degree_digits), degrees)) throw FieldError("malformed coordinate degrees");
  double minutes = 0.0;
  if (!text::parse_decimal(value.substr(degree_digits), minutes)) throw FieldError("malformed coordinate minutes");
  if (minutes >= 60.0) throw FieldError("coordinate minutes out of range");

  double deg = static_cast<double>(degrees) + minutes / 60.0;
  const double limit = is_latitude ? 90.0 : 180.0;
  if (deg > limit) throw FieldError("coordinate out of range");

  if (hemisphere.size() != 1) throw FieldError("malformed hemisphere field");
  const char h = hemisphere.front();
  if (is_latitude ? h == 'S' : h == 'W') {
    deg = -deg;
  } else if (is_latitude ? h != 'N' : h != 'E') {
    throw FieldError("malformed hemisphere field");
  }
  return deg;
}

std::string format_coordinate(double deg, bool is_latitude) {
  const double mag = std::fabs(deg);
  auto whole = static_cast<int>(std::floor(mag));
  double minutes = (mag - whole) * 60.0;
  if (text::fixed(minutes, 6) == "60.000000") {
    ++whole;
    minutes = 0.0;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*d%09.6f", is_latitude ? 2 : 3, whole, minutes);
  return buf;
}

std::string format_time(const std::optional<UtcTime>& t) {
  if (!t) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d%02d%02d.%02d", t->hour, t->minute, t->second, t->millisecond / 10);
  return buf;
}

std::string assemble(std::string_view payload) {
  std::string line = "$";
  line += payload;
  line += '*';
  line += checksum(payload);
  return line;
}

}  // namespace

const char* to_string(FixQuality q) {
  switch (q) {
    case FixQuality::no_fix: return "NO_FIX";
    case FixQuality::gps_fix: return "GPS_FIX";
    case FixQuality::dgps_fix: return "DGPS_FIX";
  }
  return "?";
}

const char* to_string(LineOutcome o) {
  switch (o) {
    case LineOutcome::fix: return "fix";
    case LineOutcome::no_fix: return "no_fix";
    case LineOutcome::framing_error: return "framing";
    case LineOutcome::checksum_error: return "checksum";
    case LineOutcome::unsupported: return "unsupported";
    case LineOutcome::field_error: return "field";
  }
  return "?";
}

std::int64_t UtcTime::millis_of_day() const {
  return ((hour * 60LL + minute) * 60 + second) * 1000 + millisecond;
}

UtcTime UtcTime::from_millis_of_day(std::int64_t ms) {
  ms %= kMillisPerDay;
  if (ms < 0) ms += kMillisPerDay;
  UtcTime t;
  t.millisecond = static_cast<int>(ms % 1000);
  t.second = static_cast<int>(ms / 1000 % 60);
  t.minute = static_cast<int>(ms / 60000 % 60);
  t.hour = static_cast<int>(ms / 3600000);
  return t;
}

std::string UtcTime::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d.%03d", hour, minute, second, millisecond);
  return buf;
}

std::string_view NmeaSentence::sentence_id() const {
  std::string_view t = talker_type;
  return t.size() >= 3 ? t.substr(t.size() - 3) : t;
}

std::string checksum(std::string_view payload) { return to_hex2(xor_fold(payload)); }

NmeaSentence parse_sentence(std::string_view line) {
  if (line.ends_with('\n')) line.remove_suffix(1);
  if (line.ends_with('\r')) line.remove_suffix(1);

  if (line.empty() || line.front() != '$') throw FramingError("sentence does not start with '$'");
  const std::size_t n = line.size();
  if (n < 4 || line[n - 3] != '*') throw FramingError("missing '*' checksum delimiter");
  const auto stored = parse_hex2(line.substr(n - 2));
  if (!stored) throw FramingError("checksum is not two uppercase hex digits");

  // Checksum before content validation: a corrupted payload byte is always
  // reported as a checksum failure.
  const auto payload = line.substr(1, n - 4);
  if (xor_fold(payload) != *stored) throw ChecksumError("checksum mismatch");

  for (char c : payload) {
    if (c < 0x20 || c > 0x7E || c == '$' || c == '*') throw FramingError("illegal byte in payload");
  }

  const auto parts = text::split(payload, ',');
  const auto talker = parts.front();
  if (talker.size() != 5) throw FramingError("malformed talker/sentence identifier");
  for (char c : talker)
    if (!is_upper_alnum(c)) throw FramingError("malformed talker/sentence identifier");

  NmeaSentence s;
  s.talker_type = std::string(talker);
  s.checksum = *stored;
  if (s.sentence_id() != "GGA" && s.sentence_id() != "RMC")
    throw UnsupportedSentence("unsupported sentence " + s.talker_type);

  s.fields.reserve(parts.size() - 1);
  for (std::size_t i = 1; i < parts.size(); ++i) s.fields.emplace_back(parts[i]);
  return s;
}

GeoFix to_geofix(const NmeaSentence& sentence) {
  const auto& f = sentence.fields;
  GeoFix fix;
  const auto id = sentence.sentence_id();
  if (id == "GGA") {
    if (f.size() < 7) throw FieldError("GGA sentence has too few fields");
    fix.timestamp_utc = parse_time(f[0]);
    unsigned long long quality = 0;
    if (!text::parse_uint(f[5], quality) || quality > 9) throw FieldError("malformed GGA quality field");
    if (!f[6].empty()) {
      unsigned long long sats = 0;
      if (!text::parse_uint(f[6], sats) || sats > 99) throw FieldError("malformed satellite count");
      fix.satellites = static_cast<int>(sats);
    }
    if (quality == 0) return fix;
    fix.quality = quality == 2 ? FixQuality::dgps_fix : FixQuality::gps_fix;
    fix.latitude_deg = parse_coordinate(f[1], f[2], true);
    fix.longitude_deg = parse_coordinate(f[3], f[4], false);
    return fix;
  }
  if (id == "RMC") {
    if (f.size() < 6) throw FieldError("RMC sentence has too few fields");
    fix.timestamp_utc = parse_time(f[0]);
    if (f[1] == "V") return fix;
    if (f[1] != "A") throw FieldError("malformed RMC status field");
    fix.quality = FixQuality::gps_fix;
    if (f.size() > 11) {
      if (f[11] == "N") return GeoFix{0.0, 0.0, FixQuality::no_fix, fix.timestamp_utc, std::nullopt};
      if (f[11] == "D") fix.quality = FixQuality::dgps_fix;
    }
    fix.latitude_deg = parse_coordinate(f[2], f[3], true);
    fix.longitude_deg = parse_coordinate(f[4], f[5], false);
    return fix;
  }
  throw FieldError("cannot derive a fix from " + sentence.talker_type);
}

std::string format_gga(const GeoFix& fix) {
  std::string p = "GPGGA," + format_time(fix.timestamp_utc) + ',';
  if (fix.has_position()) {
    p += format_coordinate(fix.latitude_deg, true) + (fix.latitude_deg < 0 ? ",S," : ",N,");
    p += format_coordinate(fix.longitude_deg, false) + (fix.longitude_deg < 0 ? ",W," : ",E,");
  } else {
    p += ",,,,";
  }
  p += fix.quality == FixQuality::no_fix ? "0" : fix.quality == FixQuality::dgps_fix ? "2" : "1";
  p += ',';
  if (fix.satellites) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d", *fix.satellites);
    p += buf;
  }
  p += ",0.9,0.0,M,0.0,M,,";
  return assemble(p);
}

std::string format_rmc(const GeoFix& fix) {
  std::string p = "GPRMC," + format_time(fix.timestamp_utc) + ',';
  if (fix.has_position()) {
    p += "A,";
    p += format_coordinate(fix.latitude_deg, true) + (fix.latitude_deg < 0 ? ",S," : ",N,");
    p += format_coordinate(fix.longitude_deg, false) + (fix.longitude_deg < 0 ? ",W," : ",E,");
  } else {
    p += "V,,,,,";
  }
  p += "0.0,0.0,,,,";
  p += fix.quality == FixQuality::no_fix ? "N" : fix.quality == FixQuality::dgps_fix ? "D" : "A";
  return assemble(p);
}

LineOutcome FixTracker::ingest(std::string_view line, std::int64_t now_ms) {
  try {
    const auto fix = to_geofix(parse_sentence(line));
    update(fix, now_ms);
    return fix.has_position() ? LineOutcome::fix : LineOutcome::no_fix;
  } catch (const FramingError&) {
    ++counters_.framing_errors;
    return LineOutcome::framing_error;
  } catch (const ChecksumError&) {
    ++counters_.checksum_errors;
    return LineOutcome::checksum_error;
  } catch (const UnsupportedSentence&) {
    ++counters_.unsupported;
    return LineOutcome::unsupported;
  } catch (const FieldError&) {
    ++counters_.field_errors;
    return LineOutcome::field_error;
  }
}

void FixTracker::update(const GeoFix& fix, std::int64_t now_ms) {
  last_sentence_ms_ = now_ms;
  if (fix.timestamp_utc) {
    last_utc_ = fix.timestamp_utc;
    last_utc_ms_ = now_ms;
  }
  if (fix.has_position()) {
    latest_ = fix;
    last_fix_ms_ = now_ms;
    ++counters_.accepted;
  } else {
    ++counters_.no_fix;
  }
}

std::optional<std::int64_t> FixTracker::fix_age_ms(std::int64_t now_ms) const {
  if (!last_fix_ms_) return std::nullopt;
  return now_ms - *last_fix_ms_;
}

std::optional<UtcTime> FixTracker::utc_at(std::int64_t now_ms) const {
  if (!last_utc_) return std::nullopt;
  return UtcTime::from_millis_of_day(last_utc_->millis_of_day() + (now_ms - last_utc_ms_));
}

}  // namespace ridesafe::nmea
