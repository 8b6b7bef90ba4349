#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace minilab {

// Logical time. The engine never reads a wall clock; callers inject instants,
// and files store them as integer seconds since the epoch.
using Duration = std::chrono::seconds;
using Instant = std::chrono::sys_seconds;

inline Instant at_seconds(std::int64_t s) { return Instant{Duration{s}}; }
inline std::int64_t to_seconds(Instant t) { return t.time_since_epoch().count(); }

inline constexpr Duration days(std::int64_t n) { return Duration{n * 86400}; }

// "1970-01-01T00:00:00Z" style, seconds resolution.
std::string to_rfc3339(Instant t);
Instant parse_rfc3339(const std::string& text);

Instant wall_clock_now();

}  // namespace minilab
