#include <doctest.h>

#include <stdexcept>

#include "soop/time.hpp"

using namespace soop;

TEST_CASE("rfc3339 round trip") {
    const UtcTime t = parse_rfc3339("2024-04-19T00:00:00Z");
    CHECK(format_rfc3339(t) == "2024-04-19T00:00:00Z");
    CHECK(format_rfc3339(add_seconds(t, 0.5)) == "2024-04-19T00:00:00.5Z");
    CHECK(format_rfc3339(parse_rfc3339("2024-04-19T02:00:00.5+02:00")) == "2024-04-19T00:00:00.5Z");
    CHECK(format_rfc3339(parse_rfc3339("2024-02-29T23:59:59.123456789Z")) == "2024-02-29T23:59:59.123456789Z");
}

TEST_CASE("malformed timestamps are rejected") {
    for (const char* bad : {"", "2024-04-19", "2024-04-19T00:00:00", "2024-13-01T00:00:00Z",
                            "2023-02-29T00:00:00Z", "2024-04-19T25:00:00Z", "2024-04-19T00:00:00Zjunk"})
        CHECK_THROWS_AS(parse_rfc3339(bad), std::invalid_argument);
}

TEST_CASE("tle epoch conversion") {
    CHECK(format_rfc3339(from_tle_epoch(24, 110.0)) == "2024-04-19T00:00:00Z");
    CHECK(format_rfc3339(from_tle_epoch(0, 1.5)) == "2000-01-01T12:00:00Z");
    CHECK(format_rfc3339(from_tle_epoch(57, 1.0)) == "1957-01-01T00:00:00Z");
    CHECK(format_rfc3339(from_tle_epoch(56, 1.0)) == "2056-01-01T00:00:00Z");
}

TEST_CASE("julian date") {
    const JulianDate j2000 = julian_date(parse_rfc3339("2000-01-01T12:00:00Z"));
    CHECK(j2000.value() == doctest::Approx(2451545.0).epsilon(1e-15));
    const JulianDate jd = julian_date(parse_rfc3339("2024-04-19T06:00:00Z"));
    CHECK(jd.whole == 2460419.5);
    CHECK(jd.fraction == doctest::Approx(0.25));
}

TEST_CASE("differences") {
    const UtcTime a = parse_rfc3339("2024-04-19T00:00:00Z");
    const UtcTime b = parse_rfc3339("2024-04-19T01:30:00Z");
    CHECK(minutes_between(b, a) == 90.0);
    CHECK(seconds_between(a, b) == -5400.0);
    CHECK(add_seconds(a, 5400.0) == b);
}
