#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ridesafe/errors.hpp"
#include "ridesafe/nmea.hpp"

using namespace ridesafe;
using namespace ridesafe::nmea;

namespace {

const std::string kGgaPayload = "GPGGA,123519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,";
const std::string kRmcPayload = "GPRMC,225446,A,2246.848,S,04319.314,W,000.5,054.7,191194,020.3,E";

std::string framed(const std::string& payload) { return "$" + payload + "*" + oracle::hex2(oracle::xor_bytes(payload)); }

}  // namespace

TEST_CASE("checksum of the empty payload is 00") { CHECK(checksum("") == "00"); }

TEST_CASE("checksum matches the byte-wise XOR oracle") {
  CHECK(oracle::hex2(oracle::xor_bytes(kGgaPayload)) == "47");
  CHECK(checksum(kGgaPayload) == "47");
}

TEST_CASE("checksum is linear in single-byte XOR changes") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::string p(1 + rng() % 80, ' ');
    for (auto& c : p) c = static_cast<char>(0x20 + rng() % 0x5F);
    const auto before = std::stoi(checksum(p), nullptr, 16);
    p[rng() % p.size()] ^= 0x01;
    CHECK(std::stoi(checksum(p), nullptr, 16) == (before ^ 0x01));
  }
}

TEST_CASE("parse_sentence accepts a valid GGA") {
  const auto s = parse_sentence("$" + kGgaPayload + "*47");
  CHECK(s.talker_type == "GPGGA");
  CHECK(s.fields.size() == oracle::count_fields_after_talker(kGgaPayload));
  CHECK(s.fields.size() == 14);
  CHECK(s.checksum == 0x47);
  CHECK(s.fields[1] == "4807.038");
}

TEST_CASE("parse_sentence tolerates CRLF line endings") {
  CHECK_NOTHROW(parse_sentence("$" + kGgaPayload + "*47\r\n"));
}

TEST_CASE("parse_sentence errors") {
  CHECK_THROWS_AS(parse_sentence("$" + kGgaPayload + "*48"), ChecksumError);
  CHECK_THROWS_AS(parse_sentence(kGgaPayload + "*47"), FramingError);
  CHECK_THROWS_AS(parse_sentence("$" + kGgaPayload), FramingError);
  CHECK_THROWS_AS(parse_sentence("$" + kGgaPayload + "*4"), FramingError);
  CHECK_THROWS_AS(parse_sentence(""), FramingError);
  CHECK_THROWS_AS(parse_sentence(framed("GPGSV,3,1,11,03,03,111,00")), UnsupportedSentence);
  CHECK_THROWS_AS(parse_sentence(framed("GPGG,1,2")), FramingError);
  CHECK_THROWS_AS(parse_sentence(framed("GPGGA,1*2")), FramingError);
}

TEST_CASE("parse_sentence rejects lowercase checksum digits") {
  const std::string payload = "GPGGA,,,,,,0,,,,,,,,";
  const auto ck = oracle::hex2(oracle::xor_bytes(payload));
  std::string lower = ck;
  for (auto& c : lower) c = static_cast<char>(std::tolower(c));
  if (lower != ck) CHECK_THROWS_AS(parse_sentence("$" + payload + "*" + lower), FramingError);
}

TEST_CASE("GGA decodes with the dd + mm/60 oracle") {
  const auto fix = to_geofix(parse_sentence("$" + kGgaPayload + "*47"));
  CHECK(fix.quality == FixQuality::gps_fix);
  CHECK(fix.latitude_deg == doctest::Approx(oracle::dm_to_deg(48, 7.038, false)).epsilon(1e-12));
  CHECK(fix.longitude_deg == doctest::Approx(oracle::dm_to_deg(11, 31.000, false)).epsilon(1e-12));
  CHECK(std::abs(fix.latitude_deg - 48.117300) < 1e-6);
  CHECK(std::abs(fix.longitude_deg - 11.516667) < 1e-6);
  REQUIRE(fix.satellites);
  CHECK(*fix.satellites == 8);
  REQUIRE(fix.timestamp_utc);
  CHECK(fix.timestamp_utc->to_string() == "12:35:19.000");
}

TEST_CASE("GGA quality 0 is NO_FIX with coordinates withheld") {
  const auto fix = to_geofix(parse_sentence(framed("GPGGA,123519,4807.038,N,01131.000,E,0,00,,,M,,M,,")));
  CHECK(fix.quality == FixQuality::no_fix);
  CHECK_FALSE(fix.has_position());
  CHECK(fix.latitude_deg == 0.0);
  CHECK(fix.longitude_deg == 0.0);

  const auto empty = to_geofix(parse_sentence(framed("GPGGA,,,,,,0,,,,,,,,")));
  CHECK(empty.quality == FixQuality::no_fix);
}

TEST_CASE("GGA quality 2 is DGPS") {
  const auto fix = to_geofix(parse_sentence(framed("GPGGA,123519,4807.038,N,01131.000,E,2,08,0.9,545.4,M,46.9,M,,")));
  CHECK(fix.quality == FixQuality::dgps_fix);
}

TEST_CASE("RMC decodes with hemisphere signs") {
  const auto fix = to_geofix(parse_sentence(framed(kRmcPayload)));
  CHECK(fix.quality == FixQuality::gps_fix);
  CHECK(fix.latitude_deg == doctest::Approx(oracle::dm_to_deg(22, 46.848, true)).epsilon(1e-12));
  CHECK(fix.longitude_deg == doctest::Approx(oracle::dm_to_deg(43, 19.314, true)).epsilon(1e-12));
  CHECK(std::abs(fix.latitude_deg - -22.780800) < 1e-6);
  CHECK(std::abs(fix.longitude_deg - -43.321900) < 1e-6);
}

TEST_CASE("RMC void status is NO_FIX") {
  const auto fix = to_geofix(parse_sentence(framed("GPRMC,225446,V,,,,,,,191194,,")));
  CHECK(fix.quality == FixQuality::no_fix);
}

TEST_CASE("malformed coordinates raise FieldError") {
  for (const auto* payload : {
           "GPGGA,123519,48O7.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,",  // letter O
           "GPGGA,123519,4860.000,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,",  // minutes == 60
           "GPGGA,123519,4807.038,X,01131.000,E,1,08,0.9,545.4,M,46.9,M,,",  // hemisphere
           "GPGGA,123519,407.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,",   // short degrees
           "GPGGA,123519,9107.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,",  // > 90
           "GPGGA,123519,4807.038,N,18131.000,E,1,08,0.9,545.4,M,46.9,M,,",  // > 180
           "GPGGA,123519,,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,",          // empty with fix
           "GPGGA,123519,4807.038,N,01131.000,E,x,08,0.9,545.4,M,46.9,M,,",  // quality
           "GPGGA,126519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,",  // minute 65
           "GPGGA,123519",                                                   // too short
       }) {
    CAPTURE(payload);
    CHECK_THROWS_AS(to_geofix(parse_sentence(framed(payload))), FieldError);
  }
}

TEST_CASE("hemisphere swap negates exactly") {
  const auto n = to_geofix(parse_sentence(framed("GPGGA,123519,2246.848,N,04319.314,E,1,08,,,,,,,")));
  const auto s = to_geofix(parse_sentence(framed("GPGGA,123519,2246.848,S,04319.314,W,1,08,,,,,,,")));
  CHECK(s.latitude_deg == -n.latitude_deg);
  CHECK(s.longitude_deg == -n.longitude_deg);
}

TEST_CASE("format_gga round trip within 1e-6 degrees") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(-90.0, 90.0), lon(-180.0, 180.0);
  for (int i = 0; i < 2000; ++i) {
    GeoFix f;
    f.latitude_deg = lat(rng);
    f.longitude_deg = lon(rng);
    f.quality = FixQuality::gps_fix;
    const auto back = to_geofix(parse_sentence(format_gga(f)));
    CHECK(std::abs(back.latitude_deg - f.latitude_deg) < 1e-6);
    CHECK(std::abs(back.longitude_deg - f.longitude_deg) < 1e-6);
  }
  for (double edge : {90.0, -90.0}) {
    GeoFix f{edge, 180.0, FixQuality::gps_fix, std::nullopt, std::nullopt};
    const auto back = to_geofix(parse_sentence(format_gga(f)));
    CHECK(back.latitude_deg == edge);
    CHECK(back.longitude_deg == 180.0);
  }
}

TEST_CASE("format_rmc round trips too") {
  GeoFix f{-33.8688, 151.2093, FixQuality::gps_fix, UtcTime{1, 2, 3, 450}, std::nullopt};
  const auto back = to_geofix(parse_sentence(format_rmc(f)));
  CHECK(std::abs(back.latitude_deg - f.latitude_deg) < 1e-6);
  CHECK(std::abs(back.longitude_deg - f.longitude_deg) < 1e-6);
  CHECK(back.timestamp_utc == f.timestamp_utc);
}

TEST_CASE("any single bit flip in the payload is a ChecksumError") {
  const std::string line = "$" + kGgaPayload + "*47";
  for (std::size_t pos = 1; pos < line.size() - 3; ++pos) {
    for (int bit = 0; bit < 8; ++bit) {
      auto bad = line;
      bad[pos] = static_cast<char>(bad[pos] ^ (1 << bit));
      CAPTURE(pos);
      CAPTURE(bit);
      CHECK_THROWS_AS(parse_sentence(bad), ChecksumError);
    }
  }
}

TEST_CASE("parser is total over random bytes") {
  std::mt19937 rng(3);
  int parsed = 0;
  for (int i = 0; i < 20000; ++i) {
    std::string s(rng() % 90, '\0');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    if (i % 2 == 0 && !s.empty()) s[0] = '$';
    if (i % 3 == 0 && s.size() > 3) s[s.size() - 3] = '*';
    try {
      (void)to_geofix(parse_sentence(s));
      ++parsed;
    } catch (const ridesafe::Error&) {
    }
  }
  // Random mutations of a valid sentence: parsed or typed error, never a crash.
  const std::string line = "$" + kGgaPayload + "*47";
  for (int i = 0; i < 20000; ++i) {
    auto s = line;
    const int edits = 1 + rng() % 4;
    for (int e = 0; e < edits; ++e) s[rng() % s.size()] = static_cast<char>(rng() % 128);
    try {
      (void)to_geofix(parse_sentence(s));
    } catch (const ridesafe::Error&) {
    }
  }
  CHECK(parsed >= 0);
}

TEST_CASE("FixTracker keeps the last good fix across NO_FIX") {
  FixTracker t;
  CHECK_FALSE(t.latest());
  CHECK(t.ingest("$" + kGgaPayload + "*47", 1000) == LineOutcome::fix);
  CHECK(t.ingest(framed("GPGGA,123520,,,,,0,00,,,M,,M,,"), 2000) == LineOutcome::no_fix);
  REQUIRE(t.latest());
  CHECK(std::abs(t.latest()->latitude_deg - 48.1173) < 1e-9);
  CHECK(t.fix_age_ms(2500) == 1500);
  CHECK(t.last_sentence_ms() == 2000);
  CHECK(t.counters().accepted == 1);
  CHECK(t.counters().no_fix == 1);
}

TEST_CASE("FixTracker counts dropped lines by kind") {
  FixTracker t;
  CHECK(t.ingest("garbage", 1) == LineOutcome::framing_error);
  CHECK(t.ingest("$" + kGgaPayload + "*48", 2) == LineOutcome::checksum_error);
  CHECK(t.ingest(framed("GPGSV,1,1,00"), 3) == LineOutcome::unsupported);
  CHECK(t.ingest(framed("GPGGA,1,99xx,N,1,E,1,,,,,,,,"), 4) == LineOutcome::field_error);
  CHECK(t.counters().dropped() == 4);
  CHECK_FALSE(t.latest());
}

TEST_CASE("FixTracker extrapolates UTC from the last timestamped sentence") {
  FixTracker t;
  CHECK_FALSE(t.utc_at(0));
  t.ingest(framed("GPGGA,230547.00,2346.848,N,09025.314,E,1,08,,,,,,,"), 10'000);
  REQUIRE(t.utc_at(15'000));
  CHECK(t.utc_at(15'000)->to_string() == "23:05:52.000");
  CHECK(t.utc_at(10'000 + 13 * 60 * 1000)->to_string() == "23:18:47.000");
}

TEST_CASE("UtcTime wraps at midnight") {
  const auto t = UtcTime::from_millis_of_day(UtcTime{23, 59, 59, 500}.millis_of_day() + 1000);
  CHECK(t.to_string() == "00:00:00.500");
}
