#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "lumiprep/error.hpp"

namespace lumiprep {

struct UtcTime {
    int year = 1970;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    double second = 0.0;
};

// Accepts "YYYY-MM-DDTHH:MM:SS[.frac][Z]"; a space may stand in for 'T'.
// Values are always interpreted as UTC.
inline UtcTime parse_iso8601_utc(const std::string& text) {
    UtcTime t;
    char sep = 0;
    char tail[8] = {};
    const int n = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%lf%7s",
                              &t.year, &t.month, &t.day, &sep, &t.hour, &t.minute,
                              &t.second, tail);
    if (n < 7 || (sep != 'T' && sep != 't' && sep != ' '))
        throw Error(Errc::invalid_argument, "cannot parse UTC timestamp: " + text);
    if (n == 8 && std::string(tail) != "Z" && std::string(tail) != "z")
        throw Error(Errc::invalid_argument, "only UTC ('Z') timestamps are supported: " + text);
    if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31 ||
        t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59 ||
        t.second < 0.0 || t.second >= 61.0)
        throw Error(Errc::invalid_argument, "timestamp field out of range: " + text);
    return t;
}

namespace detail {

constexpr double kDegToRad = 0.017453292519943295;
constexpr double kRadToDeg = 57.29577951308232;

inline double wrap360(double deg) {
    deg = std::fmod(deg, 360.0);
    return deg < 0.0 ? deg + 360.0 : deg;
}

inline double julian_day(const UtcTime& t) {
    const long a = (14 - t.month) / 12;
    const long y = t.year + 4800 - a;
    const long m = t.month + 12 * a - 3;
    const long jdn = t.day + (153 * m + 2) / 5 + 365 * y + y / 4 - y / 100 + y / 400 - 32045;
    const double day_frac =
        (static_cast<double>(t.hour) - 12.0) / 24.0 +
        static_cast<double>(t.minute) / 1440.0 + t.second / 86400.0;
    return static_cast<double>(jdn) + day_frac;
}

} // namespace detail

// Geometric solar elevation in degrees (no refraction), via the standard
// truncated-series solar position: mean longitude/anomaly and equation of
// center give the apparent ecliptic longitude, then declination plus the
// local hour angle from sidereal time give the altitude. Good to well under
// a tenth of a degree across the supported 1950-2100 era.
inline double sun_elevation_deg(const UtcTime& time, double latitude_deg, double longitude_deg) {
    using namespace detail;
    if (latitude_deg < -90.0 || latitude_deg > 90.0 ||
        longitude_deg < -180.0 || longitude_deg > 180.0)
        throw Error(Errc::out_of_range_coordinates,
                    "lat " + std::to_string(latitude_deg) + ", lon " + std::to_string(longitude_deg));
    if (time.year < 1950 || time.year > 2100)
        throw Error(Errc::unsupported_epoch,
                    "year " + std::to_string(time.year) + " outside 1950-2100");

    const double jd = julian_day(time);
    const double T = (jd - 2451545.0) / 36525.0;

    const double mean_long = wrap360(280.46646 + T * (36000.76983 + 0.0003032 * T));
    const double mean_anom = wrap360(357.52911 + T * (35999.05029 - 0.0001537 * T));
    const double m_rad = mean_anom * kDegToRad;

    const double center =
        std::sin(m_rad) * (1.914602 - T * (0.004817 + 0.000014 * T)) +
        std::sin(2.0 * m_rad) * (0.019993 - 0.000101 * T) +
        std::sin(3.0 * m_rad) * 0.000289;

    const double true_long = mean_long + center;
    const double omega = (125.04 - 1934.136 * T) * kDegToRad;
    const double apparent_long = (true_long - 0.00569 - 0.00478 * std::sin(omega)) * kDegToRad;

    const double obliquity0 =
        23.0 + (26.0 + (21.448 - T * (46.815 + T * (0.00059 - T * 0.001813))) / 60.0) / 60.0;
    const double obliquity = (obliquity0 + 0.00256 * std::cos(omega)) * kDegToRad;

    const double declination = std::asin(std::sin(obliquity) * std::sin(apparent_long));
    const double right_ascension = std::atan2(std::cos(obliquity) * std::sin(apparent_long),
                                              std::cos(apparent_long));

    const double gmst_deg = wrap360(280.46061837 + 360.98564736629 * (jd - 2451545.0) +
                                    T * T * (0.000387933 - T / 38710000.0));
    double hour_angle = wrap360(gmst_deg + longitude_deg - right_ascension * kRadToDeg);
    if (hour_angle > 180.0) hour_angle -= 360.0;

    const double lat_rad = latitude_deg * kDegToRad;
    const double sin_elev = std::sin(lat_rad) * std::sin(declination) +
                            std::cos(lat_rad) * std::cos(declination) *
                                std::cos(hour_angle * kDegToRad);
    return std::asin(std::clamp(sin_elev, -1.0, 1.0)) * kRadToDeg;
}

} // namespace lumiprep
