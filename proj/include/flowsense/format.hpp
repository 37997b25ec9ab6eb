#pragma once

#include <charconv>
#include <string>

namespace flowsense {

// Shortest decimal string that round-trips to the same double. Used for all
// CSV/JSON output so identical runs produce identical bytes.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

} // namespace flowsense
