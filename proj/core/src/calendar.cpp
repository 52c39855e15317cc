#include "famarec/calendar.hpp"

#include "famarec/error.hpp"

#include <charconv>
#include <string>

namespace famarec {
namespace {

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

YearMonth YearMonth::from_ordinal(int ordinal) noexcept {
    int year = ordinal / 12;
    int month = ordinal % 12;
    if (month < 0) {
        month += 12;
        --year;
    }
    return {year, month + 1};
}

YearMonth YearMonth::parse(std::string_view text) {
    const std::string original(text);
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);

    const auto sep = text.find_first_of(":-/M");
    int year = 0;
    int month = 0;
    bool ok = sep != std::string_view::npos && sep == 4 && parse_int(text.substr(0, 4), year);
    if (ok) {
        auto rest = text.substr(sep + 1);
        if (text[sep] == '-' || text[sep] == '/') {
            // optional day component
            const auto day_sep = rest.find(text[sep]);
            if (day_sep != std::string_view::npos) {
                int day = 0;
                ok = parse_int(rest.substr(day_sep + 1), day) && day >= 1 && day <= 31;
                rest = rest.substr(0, day_sep);
            }
        }
        ok = ok && parse_int(rest, month);
    }
    if (!ok || month < 1 || month > 12) throw InputError("unparseable date: '" + original + "'");
    return {year, month};
}

std::string YearMonth::label() const {
    return std::to_string(year) + ":" + std::to_string(month);
}

std::string range_label(const YearMonth& first, const YearMonth& last) {
    return first.label() + "–" + last.label();
}

}  // namespace famarec
