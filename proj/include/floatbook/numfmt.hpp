#pragma once

#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

namespace floatbook {

namespace detail {

inline int significant_digits(std::string_view s) {
    int count = 0;
    bool seen_nonzero = false;
    for (char c : s) {
        if (c == 'e' || c == 'E') break;
        if (c < '0' || c > '9') continue;
        if (c == '0' && !seen_nonzero) continue; // leading zeros
        seen_nonzero = true;
        ++count;
    }
    // trailing zeros before the exponent still count as significant here,
    // which only ever over-counts and forces the 12-digit fallback.
    return count;
}

} // namespace detail

// Shortest decimal representation that round-trips, capped at 12 significant
// digits. Values needing more digits are quantized to 12 first.
inline std::string format_number(double value) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), value);
    std::string shortest(buf, r.ptr);
    if (detail::significant_digits(shortest) <= 12) return shortest;

    auto r12 = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
    double quantized = 0.0;
    std::from_chars(buf, r12.ptr, quantized);
    auto rq = std::to_chars(buf, buf + sizeof(buf), quantized);
    return std::string(buf, rq.ptr);
}

// The double that format_number(value) parses back to.
inline double quantize_number(double value) {
    const std::string s = format_number(value);
    double v = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

} // namespace floatbook
