// units.hpp - Canonical units and boundary conversions.
//
// Everything inside the library is seconds, bits and bits/second. Files use
// integer nanoseconds and bytes; configs and reports may use microseconds.

#ifndef NCDELAY_UNITS_HPP
#define NCDELAY_UNITS_HPP

#include <cmath>
#include <cstdint>

namespace ncdelay::units {

inline constexpr double kBitsPerByte = 8.0;
inline constexpr double kNsPerSecond = 1e9;
inline constexpr double kUsPerSecond = 1e6;

constexpr double bytes_to_bits(double bytes) { return bytes * kBitsPerByte; }
constexpr double bits_to_bytes(double bits) { return bits / kBitsPerByte; }
constexpr double us_to_s(double us) { return us / kUsPerSecond; }
constexpr double s_to_us(double s) { return s * kUsPerSecond; }
constexpr double ns_to_s(std::int64_t ns) { return static_cast<double>(ns) / kNsPerSecond; }

inline std::int64_t s_to_ns(double s) { return std::llround(s * kNsPerSecond); }

} // namespace ncdelay::units

#endif
