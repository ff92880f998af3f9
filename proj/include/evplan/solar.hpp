#pragma once

#include <cstdint>

namespace evplan {

struct SolarPosition {
    double zenith_deg = 90.0;    ///< apparent (refraction-corrected)
    double azimuth_deg = 0.0;    ///< clockwise from north
    double declination_deg = 0.0;
    double equation_of_time_min = 0.0;
};

/// NOAA solar position for a UTC instant (seconds since 1970-01-01).
/// Good to roughly 0.01 deg for years 1800..2100.
SolarPosition solar_position(double unix_seconds_utc, double lat_deg, double lon_deg);

/// Atmospheric refraction correction (deg) added to the geometric elevation.
double refraction_correction_deg(double elevation_deg);

/// Angle of incidence (deg) between the sun and a plane normal.
double angle_of_incidence_deg(double zenith_deg, double azimuth_deg, double tilt_deg, double surface_azimuth_deg);

/// Seconds since the epoch for a UTC civil time.
double unix_seconds(int year, unsigned month, unsigned day, int hour = 0, int minute = 0, double second = 0.0);

}  // namespace evplan
