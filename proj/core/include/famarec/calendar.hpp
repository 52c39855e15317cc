#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace famarec {

/// A calendar month. Labels use the "YYYY:M" convention (e.g. "1979:6").
struct YearMonth {
    int year = 0;
    int month = 1;  // 1..12

    [[nodiscard]] int ordinal() const noexcept { return year * 12 + (month - 1); }
    [[nodiscard]] static YearMonth from_ordinal(int ordinal) noexcept;

    [[nodiscard]] YearMonth plus_months(int months) const noexcept {
        return from_ordinal(ordinal() + months);
    }

    /// Accepts "YYYY:M", "YYYY-MM", "YYYY-MM-DD", "YYYY/MM" and "YYYYMmm".
    /// Throws InputError on anything else.
    [[nodiscard]] static YearMonth parse(std::string_view text);

    [[nodiscard]] std::string label() const;

    friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

/// "YYYY:M–YYYY:M" (en dash) for an inclusive range of months.
[[nodiscard]] std::string range_label(const YearMonth& first, const YearMonth& last);

}  // namespace famarec
