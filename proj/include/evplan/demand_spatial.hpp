#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evplan/geo_io.hpp"
#include "evplan/mobility.hpp"
#include "evplan/zoning.hpp"

namespace evplan {

enum class VehicleKind { bev, phev };

struct VehicleClass {
    std::string name;
    VehicleKind kind = VehicleKind::bev;
    double share = 0.0;
    double battery_kwh = 0.0;
    double consumption_kwh_per_km = 0.0;
    std::optional<double> max_power_kw;  ///< nullopt = unbounded
};

struct FleetSpec {
    std::vector<VehicleClass> classes;

    void validate() const;
    /// Share-weighted consumption, used for the spatial stage.
    double mean_consumption() const;

    /// 80% BEV (60 kWh, unbounded power) / 20% PHEV (15 kWh, 11 kW), both 0.183 kWh/km.
    static FleetSpec addis_default();
};

struct ChargingShares {
    double home = 1.0;
    double work = 0.0;
    double poi = 0.0;

    void validate() const;

    static ChargingShares all_home() { return {1.0, 0.0, 0.0}; }
    static ChargingShares all_work() { return {0.0, 1.0, 0.0}; }
    static ChargingShares mixed() { return {0.25, 0.25, 0.5}; }
};

struct ZoneDemand {
    double home_kwh = 0.0;
    double work_kwh = 0.0;
    double poi_kwh = 0.0;
    double total() const { return home_kwh + work_kwh + poi_kwh; }
};

struct SpatialDemand {
    std::vector<ZoneDemand> zones;
    ZoneDemand totals;

    double grand_total_kwh() const { return totals.total(); }
};

/// Daily charging energy per zone and location:
///   home_i = f_home * C / eta * VKM_out_i
///   work_i = f_work * C / eta * VKM_in_i
///   poi_i  = f_poi * C / eta * sum(VKM_out) * m_i / m_tot
SpatialDemand spatial_demand(const MobilityResult& mob, const ZoneGrid& grid, const ChargingShares& shares,
                             const FleetSpec& fleet, double eta_charge);

/// FeatureCollection with per-zone kWh by category (0.1 kWh precision).
OrderedJson demand_to_geojson(const SpatialDemand& demand, const ZoneGrid& grid);

/// CSV rows: zone_id,e_home_kwh,e_work_kwh,e_poi_kwh,e_total_kwh.
std::string demand_to_csv(const SpatialDemand& demand);

}  // namespace evplan
