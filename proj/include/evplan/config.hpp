#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evplan/analysis.hpp"
#include "evplan/demand_spatial.hpp"
#include "evplan/demand_temporal.hpp"
#include "evplan/pv_model.hpp"
#include "evplan/routing_http.hpp"

namespace evplan {

struct InputPaths {
    std::filesystem::path boundary;
    std::filesystem::path population;  ///< .asc raster or lon,lat,count CSV
    std::filesystem::path workplaces;
    std::filesystem::path pois;
    std::filesystem::path weather;
    std::filesystem::path national_load;

    /// Bundled sample inputs.
    static InputPaths sample();
};

struct MobilityConfig {
    double circuity_factor = 1.3;  ///< used when routing is disabled
    bool routing_enabled = false;
    RoutingConfig routing;
    std::size_t circuity_samples = 200;
};

struct NamedShares {
    std::string name;
    ChargingShares shares;
};

struct ChargingConfig {
    std::vector<std::string> scenarios{"home", "work", "mixed"};
    ChargingShares custom_shares = ChargingShares::mixed();
    double eta = 0.9;
    bool respect_power_caps = true;
    SocThreshold soc;
    ArrivalModel arrivals;
    ChargerMix chargers = ChargerMix::addis_default();
};

struct MonteCarloConfig {
    int runs = 5;
    int step_minutes = 15;
    double step_h() const { return step_minutes / 60.0; }
};

struct SweepConfig {
    std::vector<double> power_levels_kw{3.7, 7.4, 11.0, 15.0, 20.0, 22.0, 30.0, 40.0, 50.0};
    double arrival_sd_h = 1.8;
    int runs = 5;
};

struct PvConfig {
    double latitude = 9.03;
    double longitude = 38.74;
    double utc_offset_h = 3.0;
    int year = 2020;
    bool optimize_orientation = true;
    bool fetch_from_pvgis = false;  ///< download instead of reading `inputs.weather`
    PVSystemSpec system;
};

struct ReferenceLoadConfig {
    double study_population = 5.54e6;
    double region_population = 8.88e6;
    double region_peak_mw = 2100.0;
};

struct AnalysisConfig {
    std::vector<double> capacities_kwp_per_ev{0.5, 1.0, 1.5, 2.0};
    std::vector<std::string> holidays;  ///< YYYY-MM-DD
    double fleet_lambda = 0.05;
    double fleet_s0 = 0.0;
    std::vector<double> fleet_sigmas{1.0, 0.5, 0.2};
    double fleet_target = 1.0 / 6.0;
    ReferenceLoadConfig reference;
    std::vector<double> probability_curve_energies_kwh{1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 25, 30};
    std::size_t probability_curve_samples = 50000;
};

/// Fully resolved run configuration. Defaults reproduce the Addis Ababa case.
struct ScenarioConfig {
    std::uint64_t seed = 42;
    InputPaths inputs = InputPaths::sample();
    double cell_size_km = 1.95;
    std::int64_t n_ev = 100000;
    double extra_daily_km = 0.0;
    FleetSpec fleet = FleetSpec::addis_default();
    MobilityConfig mobility;
    ChargingConfig charging;
    MonteCarloConfig monte_carlo;
    SweepConfig sweep;
    PvConfig pv;
    AnalysisConfig analysis;
    std::filesystem::path out_dir = "out";

    /// Throws ConfigError on any inconsistent value or missing input file.
    void validate() const;

    /// Charging scenario by name: home, work, mixed or custom.
    ChargingScenario scenario(const std::string& name) const;
    std::vector<NamedShares> selected_shares() const;
    std::vector<std::int64_t> holiday_days() const;
};

/// Parses YAML text. Unknown keys and type errors raise ConfigError naming
/// the key path and line. Relative paths resolve against `base_dir`.
ScenarioConfig parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir,
                            const std::string& source_name = "<config>");
/// An empty or missing `path` yields the defaults.
ScenarioConfig load_config(const std::optional<std::filesystem::path>& path);

/// Canonical JSON form (stable key order), used for hashing and the manifest.
nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);

bool is_known_scenario(const std::string& name);

}  // namespace evplan
