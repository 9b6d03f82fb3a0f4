#pragma once

#include <charconv>
#include <string>

namespace hessex {

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace hessex
