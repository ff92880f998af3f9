#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "evplan/geo.hpp"
#include "evplan/zoning.hpp"

namespace testutil {

/// Axis-aligned square of `side_km` centred on (lon0, lat0).
inline evplan::BoundaryPolygon square(double lon0, double lat0, double side_km) {
    const evplan::LocalProjection proj({lon0, lat0});
    const double h = side_km / 2.0;
    evplan::Ring r{proj.inverse({-h, -h}), proj.inverse({h, -h}), proj.inverse({h, h}), proj.inverse({-h, h})};
    r.push_back(r.front());
    return {{{r, {}}}};
}

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto d = std::filesystem::temp_directory_path() / ("evplan_test_" + name);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testutil

#include "evplan/mobility.hpp"

namespace testutil {

/// 10 km square, 2.5 km cells, graded population and workplaces, `n_ev` vehicles.
struct World {
    evplan::ZoneGrid grid;
    evplan::DistanceMatrix dist;
    evplan::TripMatrix trips;
    evplan::MobilityResult mob;
};

inline World small_world(std::int64_t n_ev = 2000) {
    using namespace evplan;
    World w;
    ZoneGrid g = build_zone_grid(square(38.75, 9.0, 10.0), 2.5);
    std::vector<WeightedPoint> cells;
    for (const auto& z : g.zones) cells.push_back({z.centroid, 100.0 + 10.0 * z.id});
    g = aggregate_population(std::move(g), cells);
    PointSet work{PointKind::workplace, {}, {}};
    PointSet poi{PointKind::poi, {}, {}};
    for (const auto& z : g.zones) {
        for (int k = 0; k <= z.id % 4; ++k) work.points.push_back(z.centroid);
        if (z.id % 3 == 0) poi.points.push_back(z.centroid);
    }
    g = aggregate_points(std::move(g), work);
    g = aggregate_points(std::move(g), poi);
    w.grid = allocate_vehicles(std::move(g), n_ev);
    w.dist = distance_matrix(w.grid, nullptr, {1.3, 0, 0});
    w.trips = trip_probabilities(w.grid, w.dist, compute_beta(w.grid.cell_area_km2()));
    w.mob = vkm(w.grid, w.trips, w.dist);
    return w;
}

}  // namespace testutil
