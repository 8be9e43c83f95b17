#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace lungbench {

// Shortest representation that parses back to the same double.
inline std::string format_roundtrip(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, end);
}

inline std::string format_fixed(double value, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

}  // namespace lungbench
