#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace memd {

/// Shortest decimal rendering that parses back to the same double.
std::string format_real(double value);

/// Strict parse of a whole token as a double (no surrounding junk).
std::optional<double> parse_real(std::string_view token);

/// Strict parse of a whole token as an unsigned integer.
std::optional<unsigned long long> parse_unsigned(std::string_view token);

std::string_view trim(std::string_view text);

}  // namespace memd
