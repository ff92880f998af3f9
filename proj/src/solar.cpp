#include "evplan/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evplan/timeutil.hpp"

namespace evplan {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap360(double a) {
    a = std::fmod(a, 360.0);
    return a < 0.0 ? a + 360.0 : a;
}

}  // namespace

double unix_seconds(int year, unsigned month, unsigned day, int hour, int minute, double second) {
    return static_cast<double>(timeutil::days_from_civil(year, month, day)) * 86400.0 + hour * 3600.0 +
           minute * 60.0 + second;
}

double refraction_correction_deg(double e) {
    if (e > 85.0) return 0.0;
    const double te = std::tan(e * kDeg);
    double arcsec = 0.0;
    if (e > 5.0)
        arcsec = 58.1 / te - 0.07 / (te * te * te) + 0.000086 / std::pow(te, 5);
    else if (e > -0.575)
        arcsec = 1735.0 + e * (-518.2 + e * (103.4 + e * (-12.79 + e * 0.711)));
    else
        arcsec = -20.772 / te;
    return arcsec / 3600.0;
}

SolarPosition solar_position(double t, double lat, double lon) {
    const double jd = t / 86400.0 + 2440587.5;
    const double jc = (jd - 2451545.0) / 36525.0;

    const double l0 = wrap360(280.46646 + jc * (36000.76983 + jc * 0.0003032));
    const double m = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
    const double e = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);
    const double mr = m * kDeg;
    const double c = std::sin(mr) * (1.914602 - jc * (0.004817 + 0.000014 * jc)) +
                     std::sin(2 * mr) * (0.019993 - 0.000101 * jc) + std::sin(3 * mr) * 0.000289;
    const double true_long = l0 + c;
    const double omega = 125.04 - 1934.136 * jc;
    const double app_long = true_long - 0.00569 - 0.00478 * std::sin(omega * kDeg);
    const double obliq0 =
        23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0;
    const double obliq = obliq0 + 0.00256 * std::cos(omega * kDeg);
    const double decl = std::asin(std::sin(obliq * kDeg) * std::sin(app_long * kDeg)) / kDeg;

    const double y = std::pow(std::tan(obliq * kDeg / 2.0), 2);
    const double l0r = l0 * kDeg;
    const double eot = 4.0 / kDeg *
                       (y * std::sin(2 * l0r) - 2 * e * std::sin(mr) + 4 * e * y * std::sin(mr) * std::cos(2 * l0r) -
                        0.5 * y * y * std::sin(4 * l0r) - 1.25 * e * e * std::sin(2 * mr));

    double minutes = std::fmod(t, 86400.0) / 60.0;
    if (minutes < 0.0) minutes += 1440.0;
    const double tst = std::fmod(minutes + eot + 4.0 * lon, 1440.0);
    double ha = tst / 4.0 < 0.0 ? tst / 4.0 + 180.0 : tst / 4.0 - 180.0;

    const double latr = lat * kDeg, declr = decl * kDeg, har = ha * kDeg;
    const double cz = std::clamp(std::sin(latr) * std::sin(declr) + std::cos(latr) * std::cos(declr) * std::cos(har),
                                 -1.0, 1.0);
    const double zen = std::acos(cz) / kDeg;

    double az = 0.0;
    const double denom = std::cos(latr) * std::sin(zen * kDeg);
    if (std::abs(denom) > 1e-12) {
        const double ca = std::clamp((std::sin(latr) * cz - std::sin(declr)) / denom, -1.0, 1.0);
        const double a = std::acos(ca) / kDeg;
        az = ha > 0.0 ? wrap360(a + 180.0) : wrap360(540.0 - a);
    } else {
        az = lat > 0.0 ? 180.0 : 0.0;
    }

    SolarPosition p;
    p.zenith_deg = zen - refraction_correction_deg(90.0 - zen);
    p.azimuth_deg = az;
    p.declination_deg = decl;
    p.equation_of_time_min = eot;
    return p;
}

double angle_of_incidence_deg(double zenith, double azimuth, double tilt, double surface_azimuth) {
    const double c = std::cos(zenith * kDeg) * std::cos(tilt * kDeg) +
                     std::sin(zenith * kDeg) * std::sin(tilt * kDeg) * std::cos((azimuth - surface_azimuth) * kDeg);
    return std::acos(std::clamp(c, -1.0, 1.0)) / kDeg;
}

}  // namespace evplan
