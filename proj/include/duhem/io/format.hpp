#ifndef DUHEM_IO_FORMAT_HPP
#define DUHEM_IO_FORMAT_HPP

#include "../integrator.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

namespace duhem::io {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return std::signbit(x) ? "-0" : "0";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

/// Fixed-point with `digits` decimals; used for plot coordinates.
inline std::string format_fixed(double x, int digits) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
    std::string s(buf, res.ptr);
    if (s.find_first_not_of("-0.") == std::string::npos) return digits > 0 ? "0." + std::string(digits, '0') : "0";
    return s;
}

inline void write_csv(std::ostream& os, const TimeTrajectory& tr) {
    os << "step,t,u,y,branch\n";
    std::size_t step = 0;
    for (const auto& s : tr.samples) {
        os << step++ << ',' << format_double(s.t) << ',' << format_double(s.u) << ',' << format_double(s.y) << ','
           << static_cast<int>(s.branch) << '\n';
    }
}

} // namespace duhem::io

#endif // DUHEM_IO_FORMAT_HPP
