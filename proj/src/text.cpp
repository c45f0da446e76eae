#include "ridesafe/text.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace ridesafe::text {

std::string fixed(double value, int decimals) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  if (n < 0) return {};
  if (static_cast<std::size_t>(n) < sizeof buf) return std::string(buf, n);
  std::string big(static_cast<std::size_t>(n) + 1, '\0');
  std::snprintf(big.data(), big.size(), "%.*f", decimals, value);
  big.resize(static_cast<std::size_t>(n));
  return big;
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_uint(std::string_view s, unsigned long long& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, long long& out) {
  if (s.empty()) return false;
  const bool neg = s.front() == '-';
  const auto digits = neg ? s.substr(1) : s;
  unsigned long long mag = 0;
  if (!parse_uint(digits, mag)) return false;
  if (mag > 9'000'000'000'000'000'000ULL) return false;
  out = neg ? -static_cast<long long>(mag) : static_cast<long long>(mag);
  return true;
}

bool parse_decimal(std::string_view s, double& out) {
  // [-]digits[.digits]
  if (s.empty()) return false;
  std::size_t i = s.front() == '-' ? 1 : 0;
  std::size_t int_digits = 0, frac_digits = 0;
  bool dot = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '.') {
      if (dot) return false;
      dot = true;
    } else if (c >= '0' && c <= '9') {
      (dot ? frac_digits : int_digits)++;
    } else {
      return false;
    }
  }
  if (int_digits == 0 || (dot && frac_digits == 0)) return false;
  const std::string copy(s);
  errno = 0;
  char* end = nullptr;
  out = std::strtod(copy.c_str(), &end);
  return errno == 0 && end == copy.c_str() + copy.size();
}

}  // namespace ridesafe::text
