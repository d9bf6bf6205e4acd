#pragma once

#include <optional>
#include <string>
#include <string_view>

// Locale-independent number formatting and parsing.
namespace pullin::text {

/// Shortest representation that parses back to the same double.
std::string format_shortest(double value);

std::string format_fixed(double value, int decimals);

/// Whole string must be a finite number.
std::optional<double> parse_double(std::string_view s);
std::optional<long> parse_long(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace pullin::text
