#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lumiprep/solar.hpp"

using namespace lumiprep;

TEST_CASE("iso8601 parsing") {
    const UtcTime t = parse_iso8601_utc("2024-03-20T12:07:30Z");
    CHECK(t.year == 2024);
    CHECK(t.month == 3);
    CHECK(t.day == 20);
    CHECK(t.hour == 12);
    CHECK(t.minute == 7);
    CHECK(t.second == 30.0);

    const UtcTime frac = parse_iso8601_utc("1999-12-31 23:59:59.5");
    CHECK(frac.second == 59.5);

    CHECK_THROWS_AS(parse_iso8601_utc("not a time"), Error);
    CHECK_THROWS_AS(parse_iso8601_utc("2024-13-01T00:00:00Z"), Error);
    CHECK_THROWS_AS(parse_iso8601_utc("2024-03-20T12:00:00+05:30"), Error);
}

TEST_CASE("sun is near zenith at the equator around equinox solar noon") {
    // 2024-03-20, equation of time about -7.5 min, so solar noon at lon 0
    // falls near 12:07:30 UTC
    const double e = sun_elevation_deg(parse_iso8601_utc("2024-03-20T12:07:30Z"), 0.0, 0.0);
    CHECK(e >= 89.0);
    CHECK(e <= 90.0);
}

TEST_CASE("sun is below the horizon at local midnight") {
    const double e = sun_elevation_deg(parse_iso8601_utc("2024-03-20T00:00:00Z"), 0.0, 0.0);
    CHECK(e < 0.0);
    const double greenwich = sun_elevation_deg(parse_iso8601_utc("2024-06-21T00:00:00Z"), 51.48, 0.0);
    CHECK(greenwich < 0.0);
}

TEST_CASE("greenwich summer solstice noon matches the ephemeris value") {
    // max elevation there is 90 - 51.48 + 23.44 = 61.96 deg; at 12:00 UTC the
    // sun is a couple of minutes short of transit
    const double e = sun_elevation_deg(parse_iso8601_utc("2024-06-21T12:00:00Z"), 51.48, 0.0);
    CHECK(std::fabs(e - 61.95) <= 0.5);
}

TEST_CASE("equator equinox sunrise sits near zero elevation") {
    const double e = sun_elevation_deg(parse_iso8601_utc("2024-03-20T06:07:30Z"), 0.0, 0.0);
    CHECK(std::fabs(e) <= 1.0);
}

TEST_CASE("antipodal longitudes half a day apart agree within a degree") {
    const double lat = 37.0;
    const UtcTime t1 = parse_iso8601_utc("2000-09-01T03:00:00Z");
    const UtcTime t2 = parse_iso8601_utc("2000-09-01T15:00:00Z");
    for (double lon : {-120.0, -45.0, 10.0, 90.0}) {
        double anti = lon + 180.0;
        if (anti > 180.0) anti -= 360.0;
        const double e1 = sun_elevation_deg(t1, lat, lon);
        const double e2 = sun_elevation_deg(t2, lat, anti);
        CAPTURE(lon);
        CHECK(std::fabs(e1 - e2) <= 1.0);
    }
}

TEST_CASE("elevation stays sane across the supported era") {
    for (const char* stamp : {"1950-01-15T10:00:00Z", "1975-07-01T14:00:00Z",
                              "2050-04-10T09:00:00Z", "2100-11-30T16:00:00Z"}) {
        const double e = sun_elevation_deg(parse_iso8601_utc(stamp), 45.0, 7.0);
        REQUIRE(e >= -90.0);
        REQUIRE(e <= 90.0);
    }
}

TEST_CASE("coordinate and epoch validation") {
    const UtcTime t = parse_iso8601_utc("2024-01-01T00:00:00Z");
    try {
        sun_elevation_deg(t, 95.0, 0.0);
        FAIL("expected OutOfRangeCoordinates");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::out_of_range_coordinates);
    }
    CHECK_THROWS_AS(sun_elevation_deg(t, 0.0, 200.0), Error);

    try {
        sun_elevation_deg(parse_iso8601_utc("1949-12-31T00:00:00Z"), 0.0, 0.0);
        FAIL("expected UnsupportedEpoch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unsupported_epoch);
    }
    CHECK_THROWS_AS(sun_elevation_deg(parse_iso8601_utc("2101-01-01T00:00:00Z"), 0.0, 0.0), Error);
}
