#pragma once

#include <cstdio>
#include <string>

namespace thermo {

// Shortest round-trippable-enough text for reports: 12 significant digits.
inline std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace thermo
