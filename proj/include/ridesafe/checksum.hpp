#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ridesafe {

// XOR of every byte in the payload. Shared by the NMEA parser and the
// physio telemetry line protocol.
std::uint8_t xor_fold(std::string_view payload);

// Two uppercase hex digits.
std::string to_hex2(std::uint8_t value);

// Parses exactly two uppercase hex digits; anything else is nullopt.
std::optional<std::uint8_t> parse_hex2(std::string_view digits);

}  // namespace ridesafe
