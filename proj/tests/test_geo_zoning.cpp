#include <doctest.h>

#include <numeric>

#include "evplan/errors.hpp"
#include "evplan/geo_io.hpp"
#include "evplan/kernels.hpp"
#include "evplan/rng.hpp"
#include "evplan/zoning.hpp"
#include "helpers.hpp"

using namespace evplan;

TEST_CASE("haversine and projection agree at city scale") {
    const LonLat a{38.70, 9.00}, b{38.80, 9.05};
    const LocalProjection p({38.75, 9.025});
    const double planar = planar_distance(p.forward(a), p.forward(b));
    CHECK(testutil::rel(planar, haversine_km(a, b)) < 1e-3);
    const auto back = p.inverse(p.forward(a));
    CHECK(back.lon == doctest::Approx(a.lon).epsilon(1e-12));
    CHECK(back.lat == doctest::Approx(a.lat).epsilon(1e-12));
}

TEST_CASE("point in polygon with holes and edges") {
    Ring outer{{0, 0}, {4, 0}, {4, 4}, {0, 4}, {0, 0}};
    Ring hole{{1, 1}, {3, 1}, {3, 3}, {1, 3}, {1, 1}};
    Polygon poly{outer, {hole}};
    CHECK(point_in_polygon(poly, {0.5, 0.5}));
    CHECK_FALSE(point_in_polygon(poly, {2, 2}));
    CHECK_FALSE(point_in_polygon(poly, {5, 2}));
    CHECK(point_in_ring(outer, {4, 2}));  // on an edge
    CHECK(signed_area(outer) == doctest::Approx(16.0));
}

TEST_CASE("boundary validation rejects bad geometry") {
    BoundaryPolygon open{{{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}}}};
    CHECK_THROWS_AS(open.validate(), InputDataError);
    BoundaryPolygon bowtie{{{{{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}}, {}}}};
    CHECK_THROWS_AS(bowtie.validate(), InputDataError);
}

TEST_CASE("10 km square with 5 km cells gives four zones") {
    const auto b = testutil::square(38.75, 9.0, 10.0);
    const ZoneGrid g = build_zone_grid(b, 5.0);
    REQUIRE(g.size() == 4);
    CHECK(g.cell_area_km2() == doctest::Approx(25.0));
    // row-major, south first
    CHECK(g.zones[0].row == 0);
    CHECK(g.zones[0].col == 0);
    CHECK(g.zones[1].col == 1);
    CHECK(g.zones[2].row == 1);
    CHECK(g.zones[0].centroid.lat < g.zones[2].centroid.lat);
    CHECK(g.zones[0].centroid.lon < g.zones[1].centroid.lon);
}

TEST_CASE("boundary smaller than one cell gives one zone at the centroid") {
    const auto b = testutil::square(38.75, 9.0, 1.0);
    const ZoneGrid g = build_zone_grid(b, 5.0);
    REQUIRE(g.size() == 1);
    CHECK(g.zones[0].centroid.lon == doctest::Approx(b.centroid().lon).epsilon(1e-9));
    CHECK(g.zones[0].centroid.lat == doctest::Approx(b.centroid().lat).epsilon(1e-9));
    CHECK_THROWS_AS(build_zone_grid(testutil::square(38.75, 9.0, 10.0), 0.0), InputDataError);
}

TEST_CASE("sample boundary gives roughly area over cell area zones") {
    const auto b = read_boundary_geojson(std::filesystem::path(EVPLAN_DATA_DIR) / "sample" / "boundary.geojson");
    const ZoneGrid g = build_zone_grid(b, 1.95);
    const double expect = b.area_km2(g.projection) / 3.8025;
    CHECK(std::abs(static_cast<double>(g.size()) - expect) <= 0.1 * expect);
}

TEST_CASE("shared edges go to the lowest zone id") {
    const auto b = testutil::square(38.75, 9.0, 10.0);
    const ZoneGrid g = build_zone_grid(b, 5.0);
    const LonLat centre = g.projection.inverse({g.origin.x + 5.0, g.origin.y + 5.0});
    REQUIRE(g.locate(centre).has_value());
    CHECK(*g.locate(centre) == 0);
    const LonLat east_edge = g.projection.inverse({g.origin.x + 5.0, g.origin.y + 7.5});
    CHECK(*g.locate(east_edge) == 2);
}

TEST_CASE("locate matches brute-force point in polygon") {
    BoundaryPolygon b{{{{{38.70, 8.95}, {38.82, 8.96}, {38.80, 9.08}, {38.74, 9.04}, {38.69, 9.06}, {38.70, 8.95}}, {}}}};
    const ZoneGrid g = build_zone_grid(b, 1.5);
    REQUIRE(g.size() > 10);
    KeyedRng rng(7);
    std::vector<LonLat> pts;
    for (int k = 0; k < 4000; ++k) pts.push_back({38.68 + 0.16 * rng.uniform(), 8.93 + 0.17 * rng.uniform()});
    const auto serial = kernels::locate_points(g, pts, Execution::serial);
    const auto parallel = kernels::locate_points(g, pts, Execution::parallel);
    CHECK(serial == parallel);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        int brute = -1;
        for (const auto& z : g.zones)
            if (point_in_ring(z.polygon, pts[k])) {
                brute = z.id;
                break;
            }
        CHECK(serial[k] == brute);
    }
}

TEST_CASE("population raster aggregation conserves inside counts") {
    const auto b = testutil::square(38.75, 9.0, 10.0);
    ZoneGrid g = build_zone_grid(b, 5.0);
    // 40 x 40 raster symmetric about the centroid, wider than the square
    const LonLat c = b.centroid();
    PopulationRaster r;
    r.ncols = 40;
    r.nrows = 40;
    r.cell_deg = 0.004;
    r.lower_left = {c.lon - 20 * r.cell_deg, c.lat - 20 * r.cell_deg};
    r.counts.assign(1600, 10.0);
    g = aggregate_population(std::move(g), r);
    // uniform raster, symmetric zones
    for (const auto& z : g.zones) CHECK(z.population == doctest::Approx(g.zones[0].population));
    double brute = 0.0;
    for (std::size_t row = 0; row < r.nrows; ++row)
        for (std::size_t col = 0; col < r.ncols; ++col)
            for (const auto& z : g.zones)
                if (point_in_ring(z.polygon, r.cell_center(row, col))) {
                    brute += r.at(row, col);
                    break;
                }
    CHECK(brute == doctest::Approx(g.total_population));
    double sum = 0.0;
    for (const auto& z : g.zones) sum += z.population;
    CHECK(sum == doctest::Approx(g.total_population));
    CHECK(sum > 0.0);
    CHECK(sum < 16000.0);
}

TEST_CASE("largest-remainder apportionment") {
    const std::vector<double> w{1, 1, 1};
    const auto a = apportion(w, 10);
    CHECK(a == std::vector<std::int64_t>{4, 3, 3});
    const std::vector<double> ones{1, 1, 1};
    CHECK(apportion(ones, 100) == std::vector<std::int64_t>{34, 33, 33});
    const std::vector<double> big{55400.0, 5.54e6 - 55400.0};
    CHECK(apportion(big, 100000)[0] == 1000);
    const std::vector<double> w2{0.5, 0.3, 0.2};
    const auto b = apportion(w2, 7);
    CHECK(std::accumulate(b.begin(), b.end(), std::int64_t{0}) == 7);
    CHECK(b == std::vector<std::int64_t>{4, 2, 1});
    const std::vector<double> zero{0, 0};
    CHECK_THROWS(apportion(zero, 5));
}

TEST_CASE("vehicle allocation is exact and proportional") {
    const auto b = testutil::square(38.75, 9.0, 10.0);
    ZoneGrid g = build_zone_grid(b, 5.0);
    std::vector<WeightedPoint> cells;
    const double pops[] = {100, 200, 300, 400};
    for (std::size_t k = 0; k < 4; ++k) cells.push_back({g.zones[k].centroid, pops[k]});
    g = aggregate_population(std::move(g), cells);
    g = allocate_vehicles(std::move(g), 1001);
    CHECK(g.total_vehicles == 1001);
    CHECK(g.zones[3].n_ev == 401);  // 400.4 carries the largest remainder
    std::int64_t s = 0;
    for (const auto& z : g.zones) s += z.n_ev;
    CHECK(s == 1001);
}

TEST_CASE("points outside every zone are reported") {
    const auto b = testutil::square(38.75, 9.0, 10.0);
    ZoneGrid g = build_zone_grid(b, 5.0);
    PointSet ps;
    ps.kind = PointKind::workplace;
    ps.points = {g.zones[0].centroid, g.zones[0].centroid, {10.0, 10.0}};
    PointAssignment rep;
    g = aggregate_points(std::move(g), ps, &rep);
    CHECK(rep.outside == 1);
    ZoneGrid empty_pop = build_zone_grid(b, 5.0);
    const std::vector<WeightedPoint> far{{{10.0, 10.0}, 5.0}};
    CHECK_THROWS_AS(aggregate_population(std::move(empty_pop), far), InputDataError);
    CHECK(g.zones[0].workplaces == 2);
    CHECK(g.total_workplaces == 2);
}

TEST_CASE("zones geojson round trip of the sample boundary") {
    const auto b = read_boundary_geojson(std::filesystem::path(EVPLAN_DATA_DIR) / "sample" / "boundary.geojson");
    const ZoneGrid g = build_zone_grid(b, 1.95);
    const auto doc = zones_to_geojson(g);
    CHECK(doc["type"] == "FeatureCollection");
    CHECK(doc["features"].size() == g.size());
}
