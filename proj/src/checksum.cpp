#include "ridesafe/checksum.hpp"

namespace ridesafe {

std::uint8_t xor_fold(std::string_view payload) {
  std::uint8_t acc = 0;
  for (char c : payload) acc ^= static_cast<std::uint8_t>(c);
  return acc;
}

std::string to_hex2(std::uint8_t value) {
  static constexpr char digits[] = "0123456789ABCDEF";
  return {digits[value >> 4], digits[value & 0x0F]};
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::optional<std::uint8_t> parse_hex2(std::string_view digits) {
  if (digits.size() != 2) return std::nullopt;
  const int hi = hex_value(digits[0]);
  const int lo = hex_value(digits[1]);
  if (hi < 0 || lo < 0) return std::nullopt;
  return static_cast<std::uint8_t>((hi << 4) | lo);
}

}  // namespace ridesafe
