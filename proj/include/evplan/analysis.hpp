#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "evplan/pv_model.hpp"

namespace evplan {

// Indicators on a common uniform time grid. The step cancels in every ratio.

/// integral(min(pv, ev)) / integral(ev); nullopt when EV energy is zero.
std::optional<double> self_sufficiency(std::span<const double> pv, std::span<const double> ev);
/// integral(min(pv, ev)) / integral(pv); nullopt when PV energy is zero.
std::optional<double> self_consumption(std::span<const double> pv, std::span<const double> ev);
/// integral(pv) / integral(ev); nullopt when EV energy is zero.
std::optional<double> energy_coverage(std::span<const double> pv, std::span<const double> ev);

/// PV power (kW per kWp) for one local calendar day, linearly interpolated
/// from the profile samples to the centres of `24/step_h` bins. Samples
/// outside the series are treated as zero.
std::vector<double> pv_day_series(const PVProfile& pv, std::int64_t local_day, double step_h);

/// Weekday dates (days since epoch) of a year, minus holidays.
std::vector<std::int64_t> weekdays(int year, std::span<const std::int64_t> holidays = {});

/// Boxplot summary with numpy-default (linear, type 7) quantiles.
struct BoxStats {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;   ///< lowest datum >= q1 - 1.5 IQR
    double whisker_high = 0.0;  ///< highest datum <= q3 + 1.5 IQR
    std::vector<double> outliers;
};
BoxStats box_stats(std::vector<double> values);
double quantile(std::span<const double> sorted, double q);

struct DailyIndicator {
    std::int64_t day = 0;
    std::optional<double> ss;
    std::optional<double> sc;
    std::optional<double> coverage;
    double pv_kwh = 0.0;
    double ev_kwh = 0.0;
};

struct MonthlyStat {
    int month = 1;
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
};

struct CapacityResult {
    double kwp_per_ev = 0.0;
    std::vector<DailyIndicator> days;
    BoxStats ss_box;
    std::array<MonthlyStat, 12> monthly{};
    double mean_coverage = 0.0;
};

/// EV load (kW, fleet total) for a given local day on the same grid.
using DailyLoadFn = std::function<std::vector<double>(std::int64_t day, std::size_t day_index)>;

/// Runs the indicators for every listed day and capacity. The EV load is
/// requested once per day and shared across capacities.
std::vector<CapacityResult> capacity_sweep(const PVProfile& pv, const DailyLoadFn& ev_load,
                                           std::span<const double> kwp_per_ev, double n_ev,
                                           std::span<const std::int64_t> days, double step_h);

struct FleetDynamics {
    double lambda = 0.05;  ///< renewal rate, 1/years
    double sigma = 1.0;    ///< EV share of new registrations
    double s0 = 0.0;

    void validate() const;
};

double fleet_share(double t_years, const FleetDynamics& dyn);
/// Years until the share reaches `target`; ConfigError when unreachable.
double time_to_share(double target, const FleetDynamics& dyn);

struct ReferenceLoad {
    std::vector<double> national_mw;  ///< hourly, 24 values
    double share = 1.0;
    std::vector<double> city_mw;

    double peak_mw() const;
    double daily_energy_mwh() const;
};

ReferenceLoad scale_reference_load(std::span<const double> national_mw, double share);
/// share = (region peak / national peak) * (study population / region population).
ReferenceLoad scale_reference_load(std::span<const double> national_mw, double study_population,
                                   double region_population, double region_peak_mw);

/// 100 * EV daily energy / city daily energy.
double ev_uptake_percent(double ev_daily_mwh, double city_daily_mwh);
double ev_uptake_percent(double ev_daily_mwh, const ReferenceLoad& ref);

nlohmann::ordered_json box_stats_to_json(const BoxStats& b);

}  // namespace evplan
