#include "evplan/demand_spatial.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "evplan/csv.hpp"
#include "evplan/errors.hpp"

namespace evplan {

namespace {

constexpr double kShareTolerance = 1e-9;

double round_tenth(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace

void FleetSpec::validate() const {
    if (classes.empty()) throw ConfigError("fleet needs at least one vehicle class");
    double sum = 0.0;
    for (const auto& c : classes) {
        if (c.share < 0.0 || c.share > 1.0) throw ConfigError("fleet class '" + c.name + "': share must be in [0,1]");
        if (!(c.battery_kwh > 0.0)) throw ConfigError("fleet class '" + c.name + "': battery capacity must be > 0");
        if (!(c.consumption_kwh_per_km > 0.0))
            throw ConfigError("fleet class '" + c.name + "': consumption must be > 0");
        if (c.max_power_kw && !(*c.max_power_kw > 0.0))
            throw ConfigError("fleet class '" + c.name + "': max charging power must be > 0");
        sum += c.share;
    }
    if (std::abs(sum - 1.0) > kShareTolerance) throw ConfigError("fleet class shares must sum to 1");
}

double FleetSpec::mean_consumption() const {
    double c = 0.0;
    for (const auto& k : classes) c += k.share * k.consumption_kwh_per_km;
    return c;
}

FleetSpec FleetSpec::addis_default() {
    FleetSpec f;
    f.classes.push_back({"BEV", VehicleKind::bev, 0.8, 60.0, 0.183, std::nullopt});
    f.classes.push_back({"PHEV", VehicleKind::phev, 0.2, 15.0, 0.183, 11.0});
    return f;
}

void ChargingShares::validate() const {
    for (double f : {home, work, poi})
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("charging shares must each lie in [0,1]");
    if (std::abs(home + work + poi - 1.0) > kShareTolerance)
        throw ConfigError("charging shares must sum to 1 (got " + std::to_string(home + work + poi) + ")");
}

SpatialDemand spatial_demand(const MobilityResult& mob, const ZoneGrid& grid, const ChargingShares& shares,
                             const FleetSpec& fleet, double eta_charge) {
    shares.validate();
    fleet.validate();
    if (!(eta_charge > 0.0 && eta_charge <= 1.0)) throw ConfigError("charging efficiency must be in (0,1]");
    const std::size_t n = grid.size();
    if (mob.vkm_out.size() != n || mob.vkm_in.size() != n) throw InputDataError("mobility result does not match grid");
    if (shares.poi > 0.0 && grid.total_pois <= 0) throw InputDataError("no POIs to host demand");

    const double kwh_per_km = fleet.mean_consumption() / eta_charge;
    const double vkm_total = std::accumulate(mob.vkm_out.begin(), mob.vkm_out.end(), 0.0);
    const double poi_pool = shares.poi * kwh_per_km * vkm_total;

    SpatialDemand d;
    d.zones.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& z = d.zones[i];
        z.home_kwh = shares.home * kwh_per_km * mob.vkm_out[i];
        z.work_kwh = shares.work * kwh_per_km * mob.vkm_in[i];
        z.poi_kwh = grid.total_pois > 0 ? poi_pool * static_cast<double>(grid.zones[i].pois) /
                                              static_cast<double>(grid.total_pois)
                                        : 0.0;
        d.totals.home_kwh += z.home_kwh;
        d.totals.work_kwh += z.work_kwh;
        d.totals.poi_kwh += z.poi_kwh;
    }
    return d;
}

OrderedJson demand_to_geojson(const SpatialDemand& demand, const ZoneGrid& grid) {
    OrderedJson features = OrderedJson::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& z = grid.zones[i];
        const ZoneDemand e = i < demand.zones.size() ? demand.zones[i] : ZoneDemand{};
        OrderedJson ring = OrderedJson::array();
        for (const auto& p : z.polygon) ring.push_back({p.lon, p.lat});
        OrderedJson f;
        f["type"] = "Feature";
        f["properties"] = {{"id", z.id},
                           {"e_home_kwh", round_tenth(e.home_kwh)},
                           {"e_work_kwh", round_tenth(e.work_kwh)},
                           {"e_poi_kwh", round_tenth(e.poi_kwh)},
                           {"e_total_kwh", round_tenth(e.total())}};
        f["geometry"] = {{"type", "Polygon"}, {"coordinates", OrderedJson::array({ring})}};
        features.push_back(std::move(f));
    }
    return {{"type", "FeatureCollection"}, {"features", features}};
}

std::string demand_to_csv(const SpatialDemand& demand) {
    std::ostringstream os;
    os << "zone_id,e_home_kwh,e_work_kwh,e_poi_kwh,e_total_kwh\n";
    for (std::size_t i = 0; i < demand.zones.size(); ++i) {
        const auto& z = demand.zones[i];
        os << i << ',' << csv::fixed(z.home_kwh, 1) << ',' << csv::fixed(z.work_kwh, 1) << ','
           << csv::fixed(z.poi_kwh, 1) << ',' << csv::fixed(z.total(), 1) << '\n';
    }
    return os.str();
}

}  // namespace evplan
