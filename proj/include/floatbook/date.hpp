#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace floatbook {

// Calendar day. Parsed from and formatted as ISO-8601 (YYYY-MM-DD), which
// also sorts correctly as text.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    // Days since 1970-01-01 (proleptic Gregorian).
    std::int64_t to_days() const;
    static Date from_days(std::int64_t days);

    Date plus_days(std::int64_t n) const { return from_days(to_days() + n); }

    std::string to_string() const;

    // Strict YYYY-MM-DD; throws InputError on malformed or impossible dates.
    static Date parse(std::string_view text);

    static bool is_valid(int year, int month, int day);
};

} // namespace floatbook
