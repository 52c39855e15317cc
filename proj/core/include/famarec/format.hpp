#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace famarec {

/// Shortest representation that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Fixed-point rendering for human-readable tables.
[[nodiscard]] std::string format_fixed(double value, int decimals);

/// Strict parse of a decimal number (no thousands separators, no trailing junk).
[[nodiscard]] std::optional<double> parse_double(std::string_view text);

[[nodiscard]] std::string_view trim(std::string_view text) noexcept;

}  // namespace famarec
