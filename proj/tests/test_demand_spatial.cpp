#include <doctest.h>

#include "evplan/demand_spatial.hpp"
#include "evplan/errors.hpp"
#include "helpers.hpp"

using namespace evplan;

namespace {

FleetSpec single_class(double c) { return {{{"bev", VehicleKind::bev, 1.0, 60.0, c, std::nullopt}}}; }

ZoneGrid grid_with(std::vector<std::int64_t> pois) {
    ZoneGrid g;
    g.cell_size_km = 1.0;
    for (std::size_t i = 0; i < pois.size(); ++i) {
        TrafficZone z;
        z.id = static_cast<int>(i);
        z.pois = pois[i];
        g.total_pois += pois[i];
        g.zones.push_back(z);
    }
    return g;
}

MobilityResult mob_with(std::vector<double> out, std::vector<double> in) {
    MobilityResult m;
    m.vkm_out = std::move(out);
    m.vkm_in = std::move(in);
    return m;
}

}  // namespace

TEST_CASE("home demand from VKM") {
    const auto g = grid_with({1});
    const auto d = spatial_demand(mob_with({100.0}, {100.0}), g, ChargingShares::all_home(), single_class(0.183), 0.9);
    CHECK(d.zones[0].home_kwh == doctest::Approx(20.3333).epsilon(1e-4));
    CHECK(d.zones[0].work_kwh == 0.0);
}

TEST_CASE("POI demand split by POI counts") {
    const auto g = grid_with({1, 3});
    const auto d = spatial_demand(mob_with({40.0, 60.0}, {50.0, 50.0}), g, {0, 0, 1}, single_class(0.2), 1.0);
    CHECK(d.zones[0].poi_kwh == doctest::Approx(0.25 * 20.0));
    CHECK(d.zones[1].poi_kwh == doctest::Approx(0.75 * 20.0));
}

TEST_CASE("total demand independent of shares and linear in fleet") {
    const auto w = testutil::small_world(1000);
    const auto fleet = FleetSpec::addis_default();
    const double home = spatial_demand(w.mob, w.grid, ChargingShares::all_home(), fleet, 0.9).grand_total_kwh();
    const double work = spatial_demand(w.mob, w.grid, ChargingShares::all_work(), fleet, 0.9).grand_total_kwh();
    const double mixed = spatial_demand(w.mob, w.grid, ChargingShares::mixed(), fleet, 0.9).grand_total_kwh();
    CHECK(work == doctest::Approx(home).epsilon(1e-12));
    CHECK(mixed == doctest::Approx(home).epsilon(1e-12));

    const auto w2 = testutil::small_world(2000);
    const double doubled = spatial_demand(w2.mob, w2.grid, ChargingShares::all_home(), fleet, 0.9).grand_total_kwh();
    CHECK(doubled == doctest::Approx(2.0 * home).epsilon(1e-3));
}

TEST_CASE("per-vehicle arithmetic identity") {
    // 17.4 km/day at 0.183 kWh/km through a 0.9 efficient charger
    const auto g = grid_with({1});
    const auto d = spatial_demand(mob_with({17.4 * 100000}, {0.0}), g, ChargingShares::all_home(), single_class(0.183), 0.9);
    CHECK(d.grand_total_kwh() / 100000 == doctest::Approx(3.538).epsilon(1e-3));
    CHECK(d.grand_total_kwh() / 1000 == doctest::Approx(353.8).epsilon(1e-3));
}

TEST_CASE("validation") {
    const auto g = grid_with({0});
    const auto m = mob_with({1.0}, {1.0});
    CHECK_THROWS_AS(spatial_demand(m, g, {0.5, 0.3, 0.1}, single_class(0.2), 0.9), ConfigError);
    CHECK_THROWS_AS(spatial_demand(m, g, {0, 0, 1}, single_class(0.2), 0.9), InputDataError);
    CHECK_THROWS_AS(spatial_demand(m, g, ChargingShares::all_home(), single_class(0.2), 0.0), ConfigError);
    FleetSpec bad = FleetSpec::addis_default();
    bad.classes[0].share = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(FleetSpec::addis_default().mean_consumption() == doctest::Approx(0.183));
}

TEST_CASE("demand exports") {
    const auto g = grid_with({1, 1});
    const auto d = spatial_demand(mob_with({0.0, 0.0}, {0.0, 0.0}), g, ChargingShares::mixed(), single_class(0.2), 0.9);
    const auto csv = demand_to_csv(d);
    CHECK(csv.rfind("zone_id,e_home_kwh,e_work_kwh,e_poi_kwh,e_total_kwh\n", 0) == 0);
    const auto one = grid_with({1});
    const auto d1 = spatial_demand(mob_with({10.0}, {10.0}), one, ChargingShares::all_home(), single_class(0.2), 0.9);
    CHECK(demand_to_geojson(d1, one)["features"].size() == 1);
}
