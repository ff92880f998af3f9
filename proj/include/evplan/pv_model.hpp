#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evplan/kernels.hpp"

namespace evplan {

struct WeatherRecord {
    double t = 0.0;  ///< UTC seconds since the epoch
    double ghi = 0.0;
    double dni = 0.0;
    double dhi = 0.0;
    double t_amb = 20.0;
    double wind = 1.0;
};

struct WeatherSeries {
    std::vector<WeatherRecord> records;
    double lat = 0.0;
    double lon = 0.0;
    double utc_offset_h = 0.0;  ///< local = UTC + offset

    /// Throws InputDataError on negative or non-finite values or unordered times.
    void validate() const;
    /// Step between records in hours (median spacing).
    double step_h() const;
    /// Sun-up records where GHI and DHI + DNI cos(Z) disagree by more than 5%.
    std::size_t closure_mismatches() const;
};

struct PVSystemSpec {
    double eta_pv = 0.22;
    double beta_t = -0.004;  ///< 1/degC
    double tilt_deg = 10.0;
    double azimuth_deg = 180.0;  ///< clockwise from north
    double losses = 0.14;
    double a_r = 0.16;
    double albedo = 0.2;
    double u_c = 29.0;
    double u_v = 0.0;
    double alpha = 0.9;
    bool angular_losses = true;

    void validate() const;
};

struct PoaComponents {
    double beam = 0.0;
    double sky = 0.0;
    double ground = 0.0;
    double aoi_deg = 90.0;
    double total() const { return beam + sky + ground; }
};

/// Isotropic-sky transposition for one time step.
PoaComponents poa_components(double ghi, double dni, double dhi, double zenith_deg, double sun_azimuth_deg,
                             double tilt_deg, double surface_azimuth_deg, double albedo);

std::vector<double> poa_irradiance(const WeatherSeries& w, double tilt_deg, double azimuth_deg, double albedo);

/// PVsyst model: T_amb + G alpha (1 - eta) / (U_c + U_v wind).
double cell_temperature(double g_poa, double t_amb, double wind, const PVSystemSpec& spec);

/// Martin-Ruiz beam transmittance normalised to 1 at normal incidence; 0 beyond 90 deg.
double angular_loss(double aoi_deg, double a_r);

struct DiffuseIam {
    double sky = 1.0;
    double ground = 1.0;
};
/// Closed-form Martin-Ruiz factors for isotropic sky and ground diffuse.
DiffuseIam diffuse_angular_loss(double tilt_deg, double a_r);

/// kW per kWp: G/1000 (1 + beta_T (T_cell - 25)) (1 - losses), clipped at 0.
double pv_power(double g_poa, double t_cell, const PVSystemSpec& spec);

struct PVProfile {
    std::vector<double> t;          ///< UTC seconds
    std::vector<double> kw_per_kwp;
    double step_h = 1.0;
    double utc_offset_h = 0.0;

    double annual_yield_kwh_per_kwp() const;
};

/// Sun position for every record; shared across orientations.
struct SunTrack {
    std::vector<double> zenith_deg;
    std::vector<double> azimuth_deg;
};
SunTrack sun_track(const WeatherSeries& w, Execution exec = Execution::parallel);

PVProfile simulate_pv(const WeatherSeries& w, const PVSystemSpec& spec, Execution exec = Execution::parallel);
PVProfile simulate_pv(const WeatherSeries& w, const SunTrack& sun, const PVSystemSpec& spec,
                      Execution exec = Execution::parallel);

struct Orientation {
    double tilt_deg = 0.0;
    double azimuth_deg = 180.0;
    double yield_kwh_per_kwp = 0.0;
};

/// Grid search: tilt 0..45 by 1 deg, azimuth equator-facing +-90 by 5 deg.
/// Ties keep the lowest tilt, then the first azimuth scanned (east side first).
Orientation optimal_orientation(const WeatherSeries& w, const PVSystemSpec& spec, Execution exec = Execution::parallel);

/// CSV: time (ISO UTC), kW_per_kWp.
std::string pv_profile_to_csv(const PVProfile& p);

}  // namespace evplan
