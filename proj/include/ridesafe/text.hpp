#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ridesafe::text {

// printf("%.*f") into a std::string.
std::string fixed(double value, int decimals);

std::vector<std::string_view> split(std::string_view s, char delim);

// Strict decimal parsers: the whole input must be consumed, no sign unless
// allowed, no leading/trailing whitespace.
bool parse_uint(std::string_view s, unsigned long long& out);
bool parse_int(std::string_view s, long long& out);
bool parse_decimal(std::string_view s, double& out);

}  // namespace ridesafe::text
