#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace szbench {

// Shortest decimal form that parses back to the same double. Integral values
// keep one fractional digit so "10" renders as "10.0".
std::string format_seconds(double v);

// Locale-independent numeric parsing; the whole (trimmed) string must be
// consumed or the result is empty.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delim);  // keeps empty fields
std::string to_upper(std::string_view s);

}  // namespace szbench
