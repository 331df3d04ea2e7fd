#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace soop {

/// UTC instant with nanosecond resolution (leap seconds are not modeled).
using UtcTime = std::chrono::sys_time<std::chrono::nanoseconds>;

/// Parses an RFC-3339 timestamp, e.g. `2024-04-19T00:00:00Z` or
/// `2024-04-19T02:00:00.5+02:00`. Throws std::invalid_argument on malformed input.
UtcTime parse_rfc3339(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SS[.fffffffff]Z`; the fraction is emitted only
/// when non-zero, with trailing zeros trimmed.
std::string format_rfc3339(UtcTime t);

/// Builds an instant from a two-digit TLE year and fractional day of year
/// (day 1.0 is January 1st, 00:00). Years 57-99 map to 19xx, 00-56 to 20xx.
UtcTime from_tle_epoch(int two_digit_year, double day_of_year);

/// Julian date split into a whole part ending in .5 and a fraction of a day.
struct JulianDate {
    double whole;
    double fraction;
    double value() const { return whole + fraction; }
};

JulianDate julian_date(UtcTime t);

/// Signed difference `a - b` in minutes.
double minutes_between(UtcTime a, UtcTime b);

/// Signed difference `a - b` in seconds.
double seconds_between(UtcTime a, UtcTime b);

UtcTime add_seconds(UtcTime t, double seconds);

}  // namespace soop
