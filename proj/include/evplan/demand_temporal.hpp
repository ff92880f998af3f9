#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evplan/demand_spatial.hpp"
#include "evplan/kernels.hpp"
#include "evplan/mobility.hpp"
#include "evplan/rng.hpp"

namespace evplan {

enum class Location : std::uint8_t { home = 0, work = 1, poi = 2 };
inline constexpr std::array<Location, 3> kLocations{Location::home, Location::work, Location::poi};

const char* to_string(Location l);
inline std::size_t index(Location l) { return static_cast<std::size_t>(l); }

struct ChargerOption {
    double power_kw = 0.0;
    double probability = 0.0;
};

/// Charger power availability per location.
struct ChargerMix {
    std::array<std::vector<ChargerOption>, 3> options;

    const std::vector<ChargerOption>& at(Location l) const { return options[index(l)]; }
    std::vector<ChargerOption>& at(Location l) { return options[index(l)]; }

    /// Probabilities sum to 1 and powers are positive for every non-empty
    /// location; locations with a non-zero share must have options.
    void validate(const ChargingShares& shares) const;
    double mean_power(Location l) const;

    static ChargerMix addis_default();
    static ChargerMix single_power(double power_kw);
};

struct NormalArrival {
    double mean_h = 0.0;
    double sd_h = 0.0;
};

/// Home and work arrivals are normal; POI arrivals are uniform between the
/// vehicle's own work-arrival and home-arrival draws.
struct ArrivalModel {
    NormalArrival home{18.0, 2.7};
    NormalArrival work{9.0, 1.8};
};

/// Normal draw for the charging threshold state of charge, kept inside
/// [min, max] either by clamping (censoring, the default) or by redrawing
/// until the value falls strictly inside (truncation).
struct SocThreshold {
    enum class Bounding { clamp, reject };

    double mean = 0.6;
    double sd = 0.2;
    double min = 0.0;
    double max = 1.0;
    Bounding bounding = Bounding::clamp;

    void validate() const;
    /// Rejection-truncated variant on (0.05, 0.95).
    static SocThreshold truncated() { return {0.6, 0.2, 0.05, 0.95, Bounding::reject}; }
};

struct ChargingScenario {
    std::string name = "custom";
    ChargingShares shares;
    ArrivalModel arrivals;
    ChargerMix chargers = ChargerMix::addis_default();
    double eta = 0.9;
    bool respect_power_caps = true;

    void validate() const;
};

struct Vehicle {
    int id = 0;
    int class_index = 0;
    VehicleKind kind = VehicleKind::bev;
    int home_zone = 0;
    double battery_kwh = 0.0;
    std::optional<double> max_power_kw;
    double e_daily_kwh = 0.0;
    double soc0 = 0.6;
    double days_between_charges = 1.0;  ///< +inf when the vehicle never charges
};

struct ChargingSession {
    int vehicle = 0;
    Location location = Location::home;
    int zone = 0;
    double power_kw = 0.0;
    double t_arrival_h = 0.0;  ///< [0, 24)
    double t_end_h = 0.0;      ///< t_arrival + duration; may exceed 24
    double energy_kwh = 0.0;   ///< delivered to the battery (days_between * e_daily)

    double duration_h() const { return t_end_h - t_arrival_h; }
    double grid_energy_kwh() const { return power_kw * duration_h(); }
};

/// Fixed-step 24 h power series (kW), bin-averaged.
struct LoadProfile {
    double step_h = 0.25;
    int n_zones = 0;
    std::vector<double> per_zone;  ///< n_zones * nbins
    std::vector<double> total;     ///< nbins

    std::size_t nbins() const { return total.size(); }
    double peak_kw() const;
    std::size_t peak_bin() const;
    double energy_kwh() const;
    std::span<const double> zone(int z) const;
};

/// Samples destinations for work (from the origin's trip row) and POI
/// sessions (proportional to POI counts).
class DestinationSampler {
public:
    DestinationSampler() = default;
    DestinationSampler(const TripMatrix& trips, const ZoneGrid& grid);

    int work_zone(int home_zone, double u) const;
    int poi_zone(double u) const;
    std::size_t zones() const { return n_; }

private:
    std::size_t n_ = 0;
    std::vector<double> trip_cdf_;  ///< n*n cumulative rows
    std::vector<double> poi_cdf_;
};

double sample_soc0(KeyedRng& rng, const SocThreshold& soc = {});

/// Days between charges: max(1, (1 - soc0) / (e_daily / (0.8 Q))); +inf for
/// zero daily energy.
double charging_interval(double e_daily_kwh, double battery_kwh, double soc0);

bool decide_charging_today(double days_between_charges, KeyedRng& rng);

/// Builds the fleet: vehicles per zone from the allocation, class by share,
/// daily distance from the zone's two-way distribution, threshold SoC and the
/// resulting charging interval. Vehicle ids are zone-major.
std::vector<Vehicle> build_fleet(const ZoneGrid& grid, const MobilityResult& mob, const FleetSpec& fleet,
                                 const SocThreshold& soc, std::uint64_t seed, Execution exec = Execution::parallel);

/// One session for a vehicle that charges today.
ChargingSession sample_session(const Vehicle& v, const ChargingScenario& scenario, const DestinationSampler& dest,
                               KeyedRng& rng);

/// Charging decisions and sessions for one day. Each vehicle draws from its
/// own stream keyed by (seed, day, vehicle id); sessions are in vehicle order.
std::vector<ChargingSession> simulate_day(std::span<const Vehicle> fleet, const ChargingScenario& scenario,
                                          const DestinationSampler& dest, std::uint64_t seed, std::uint64_t day,
                                          Execution exec = Execution::parallel);

/// Rectangular pulses binned on a 24 h grid; pulses past midnight wrap.
LoadProfile aggregate_load(std::span<const ChargingSession> sessions, double step_h, int n_zones,
                           Execution exec = Execution::parallel);

/// Maximum number of sessions active at the same instant (exact sweep on the
/// circular day), optionally restricted to one location.
std::size_t peak_simultaneous(std::span<const ChargingSession> sessions, std::optional<Location> only = std::nullopt);

/// Sum of charging powers: every vehicle charging that day at once.
double worst_case_peak(std::span<const ChargingSession> sessions);

struct DayStats {
    std::size_t charging = 0;
    std::array<std::size_t, 3> sessions{};
    std::array<std::size_t, 3> peak_simultaneous{};
    double worst_case_kw = 0.0;
    double peak_kw = 0.0;
    double peak_time_h = 0.0;  ///< start of the peak bin
    double energy_kwh = 0.0;   ///< grid-side energy

    static DayStats from(std::span<const ChargingSession> sessions, const LoadProfile& load);
};

struct MonteCarloResult {
    double step_h = 0.25;
    std::vector<double> mean_total;
    std::vector<double> sd_total;
    std::vector<double> mean_per_zone;  ///< n_zones * nbins
    int n_zones = 0;
    std::vector<DayStats> days;
    std::vector<std::vector<ChargingSession>> sessions;  ///< per run, when kept

    double mean_peak_kw() const;
    double sd_peak_kw() const;
    double peak_of_mean_kw() const;
    std::size_t peak_of_mean_bin() const;
};

/// Independent day realizations (runs 0..n_runs-1) with per-bin mean and
/// sample standard deviation.
MonteCarloResult monte_carlo_days(std::span<const Vehicle> fleet, const ChargingScenario& scenario,
                                  const DestinationSampler& dest, int n_zones, int n_runs, std::uint64_t seed,
                                  double step_h = 0.25, bool keep_sessions = false);

struct ChargingPointRequirement {
    Location location = Location::home;
    double assigned_evs = 0.0;
    double ratio = 0.0;            ///< charging points per assigned EV
    std::int64_t points = 0;       ///< ceil(ratio * assigned)
    std::int64_t reported = 0;     ///< rounded up to the nearest 500
};

/// Home: one point per EV. Work: mean daily share of work-assigned EVs that
/// charge there. POI: mean over runs of peak simultaneous POI sessions per
/// POI-assigned EV. Locations with zero share are omitted.
std::vector<ChargingPointRequirement> charging_point_requirements(std::span<const DayStats> runs,
                                                                  const ChargingShares& shares, std::int64_t n_total);
std::vector<ChargingPointRequirement> charging_point_requirements(
    std::span<const std::vector<ChargingSession>> runs, const ChargingShares& shares, std::int64_t n_total);

std::int64_t round_up_to(double value, std::int64_t step);

struct SweepPoint {
    double power_kw = 0.0;
    double peak_kw_mean = 0.0;
    double peak_kw_sd = 0.0;
    double simultaneous_share_mean = 0.0;  ///< max concurrent / charging vehicles
    double simultaneous_share_sd = 0.0;
};

/// Single-power dummy scenario: every session at work-style arrivals
/// (mean 09:00, given sd) at one power level, caps ignored. The same day
/// seeds are reused for every level.
std::vector<SweepPoint> peak_vs_power_sweep(std::span<const Vehicle> fleet, const DestinationSampler& dest,
                                            int n_zones, std::span<const double> power_levels_kw,
                                            double arrival_sd_h, int n_runs, std::uint64_t seed, double eta = 0.9,
                                            double step_h = 0.25);

struct ProbabilityPoint {
    double e_daily_kwh = 0.0;
    double mean = 0.0;
    double sd = 0.0;
};

/// Daily charging probability 1/dN versus daily energy use for one battery
/// size, averaged over `samples` threshold draws.
std::vector<ProbabilityPoint> charging_probability_curve(std::span<const double> e_daily_kwh, double battery_kwh,
                                                         const SocThreshold& soc, std::size_t samples,
                                                         std::uint64_t seed);

/// Session log CSV with ISO-8601 local date-times relative to `date`
/// (YYYY-MM-DD); sessions past midnight end on the following day.
std::string sessions_to_csv(std::span<const ChargingSession> sessions, const std::string& date);

/// Load profile CSV: time, one column per zone, total (kW).
std::string load_profile_to_csv(std::span<const double> per_zone, std::span<const double> total, int n_zones,
                                double step_h, std::span<const double> sd_total = {});

}  // namespace evplan
