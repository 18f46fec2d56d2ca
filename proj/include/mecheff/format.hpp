#pragma once

#include <cstdio>
#include <string>

namespace mecheff {

/// Shortest-round-trip-safe rendering: 17 significant digits, %g style.
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace mecheff
