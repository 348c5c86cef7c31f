#pragma once

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

namespace htopt {

/// Shortest decimal that round-trips; used for CSV/JSON numerics.
inline std::string format_full(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Six significant digits for human-facing tables.
inline std::string format_short(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace htopt
