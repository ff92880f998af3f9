#include "evplan/zoning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evplan/errors.hpp"
#include "evplan/kernels.hpp"

namespace evplan {

namespace {

constexpr double kEdgeTolerance = 1e-9;

// Candidate cell indices along one axis; two when the coordinate sits on a
// cell edge (within tolerance), lower index first.
int axis_candidates(double f, int (&out)[2]) {
    const double nearest = std::round(f);
    if (std::abs(f - nearest) <= kEdgeTolerance * std::max(1.0, std::abs(f))) {
        out[0] = static_cast<int>(nearest) - 1;
        out[1] = static_cast<int>(nearest);
        return 2;
    }
    out[0] = static_cast<int>(std::floor(f));
    return 1;
}

void reset_population(ZoneGrid& grid) {
    for (auto& z : grid.zones) z.population = 0.0;
    grid.total_population = 0.0;
}

}  // namespace

LonLat PopulationRaster::cell_center(std::size_t row, std::size_t col) const {
    return {lower_left.lon + (static_cast<double>(col) + 0.5) * cell_deg,
            lower_left.lat + (static_cast<double>(nrows - row) - 0.5) * cell_deg};
}

void PopulationRaster::validate() const {
    if (!(cell_deg > 0.0)) throw InputDataError("population raster: cell size must be positive");
    if (counts.size() != nrows * ncols) throw InputDataError("population raster: data size does not match header");
    for (double v : counts) {
        if (!std::isfinite(v) || v < 0.0)
            throw InputDataError("population raster: counts must be finite and non-negative");
    }
}

std::optional<int> ZoneGrid::locate(LonLat p) const {
    const Xy q = projection.forward(p);
    const double fx = (q.x - origin.x) / cell_size_km;
    const double fy = (q.y - origin.y) / cell_size_km;
    int cols[2], rows[2];
    const int nc = axis_candidates(fx, cols);
    const int nr = axis_candidates(fy, rows);
    int best = -1;
    for (int a = 0; a < nr; ++a) {
        for (int b = 0; b < nc; ++b) {
            const int r = rows[a], c = cols[b];
            if (r < 0 || r >= nrows || c < 0 || c >= ncols) continue;
            const int z = cell_to_zone[static_cast<std::size_t>(r) * ncols + c];
            if (z >= 0 && (best < 0 || z < best)) best = z;
        }
    }
    if (best < 0) return std::nullopt;
    return best;
}

Xy ZoneGrid::centroid_xy(int zone) const {
    const auto& z = zones[static_cast<std::size_t>(zone)];
    return {origin.x + (z.col + 0.5) * cell_size_km, origin.y + (z.row + 0.5) * cell_size_km};
}

ZoneGrid build_zone_grid(const BoundaryPolygon& boundary, double cell_size_km) {
    if (!(cell_size_km > 0.0) || !std::isfinite(cell_size_km))
        throw InputDataError("cell size must be a positive length");
    boundary.validate();

    ZoneGrid grid;
    grid.cell_size_km = cell_size_km;
    grid.projection = LocalProjection(boundary.centroid());
    if (boundary.area_km2(grid.projection) < 1e-9)
        throw InputDataError("degenerate boundary: area is approximately zero");

    double min_x = INFINITY, min_y = INFINITY, max_x = -INFINITY, max_y = -INFINITY;
    for (const auto& poly : boundary.parts) {
        for (const auto& p : poly.exterior) {
            const Xy q = grid.projection.forward(p);
            min_x = std::min(min_x, q.x);
            min_y = std::min(min_y, q.y);
            max_x = std::max(max_x, q.x);
            max_y = std::max(max_y, q.y);
        }
    }
    grid.ncols = std::max(1, static_cast<int>(std::ceil((max_x - min_x) / cell_size_km - 1e-9)));
    grid.nrows = std::max(1, static_cast<int>(std::ceil((max_y - min_y) / cell_size_km - 1e-9)));
    grid.origin = {0.5 * (min_x + max_x) - 0.5 * grid.ncols * cell_size_km,
                   0.5 * (min_y + max_y) - 0.5 * grid.nrows * cell_size_km};
    grid.cell_to_zone.assign(static_cast<std::size_t>(grid.nrows) * grid.ncols, -1);

    const auto& proj = grid.projection;
    for (int r = 0; r < grid.nrows; ++r) {
        for (int c = 0; c < grid.ncols; ++c) {
            const double x0 = grid.origin.x + c * cell_size_km;
            const double y0 = grid.origin.y + r * cell_size_km;
            const LonLat center = proj.inverse({x0 + 0.5 * cell_size_km, y0 + 0.5 * cell_size_km});
            if (!boundary.contains(center)) continue;

            TrafficZone z;
            z.id = static_cast<int>(grid.zones.size());
            z.row = r;
            z.col = c;
            z.centroid = center;
            z.polygon = {proj.inverse({x0, y0}), proj.inverse({x0 + cell_size_km, y0}),
                         proj.inverse({x0 + cell_size_km, y0 + cell_size_km}), proj.inverse({x0, y0 + cell_size_km}),
                         proj.inverse({x0, y0})};
            grid.cell_to_zone[static_cast<std::size_t>(r) * grid.ncols + c] = z.id;
            grid.zones.push_back(std::move(z));
        }
    }
    if (grid.zones.empty()) throw InputDataError("no grid cell centre falls inside the boundary");
    return grid;
}

ZoneGrid aggregate_population(ZoneGrid grid, std::span<const WeightedPoint> cells) {
    reset_population(grid);
    std::vector<LonLat> centers(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (!std::isfinite(cells[k].weight) || cells[k].weight < 0.0)
            throw InputDataError("population counts must be finite and non-negative");
        centers[k] = cells[k].pos;
    }
    const auto zone_of = kernels::locate_points(grid, centers, Execution::parallel);

    std::size_t covered = 0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (zone_of[k] < 0) continue;
        ++covered;
        grid.zones[static_cast<std::size_t>(zone_of[k])].population += cells[k].weight;
    }
    if (covered == 0) throw InputDataError("no population coverage: population data does not overlap the zones");
    for (const auto& z : grid.zones) grid.total_population += z.population;
    return grid;
}

ZoneGrid aggregate_population(ZoneGrid grid, const PopulationRaster& raster) {
    raster.validate();
    std::vector<WeightedPoint> cells;
    cells.reserve(raster.counts.size());
    for (std::size_t r = 0; r < raster.nrows; ++r)
        for (std::size_t c = 0; c < raster.ncols; ++c) cells.push_back({raster.cell_center(r, c), raster.at(r, c)});
    return aggregate_population(std::move(grid), cells);
}

ZoneGrid aggregate_points(ZoneGrid grid, const PointSet& points, PointAssignment* report) {
    for (const auto& p : points.points) {
        if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) throw InputDataError("point with non-finite coordinates");
    }
    const auto zone_of = kernels::locate_points(grid, points.points, Execution::parallel);
    PointAssignment assignment;
    assignment.counts.assign(grid.size(), 0);
    for (int z : zone_of) {
        if (z < 0)
            ++assignment.outside;
        else
            ++assignment.counts[static_cast<std::size_t>(z)];
    }

    std::int64_t total = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (points.kind == PointKind::workplace)
            grid.zones[i].workplaces = assignment.counts[i];
        else
            grid.zones[i].pois = assignment.counts[i];
        total += assignment.counts[i];
    }
    if (points.kind == PointKind::workplace)
        grid.total_workplaces = total;
    else
        grid.total_pois = total;
    if (report) *report = std::move(assignment);
    return grid;
}

std::vector<std::int64_t> apportion(std::span<const double> weights, std::int64_t total) {
    if (total < 0) throw InputDataError("cannot apportion a negative total");
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0)) throw InputDataError("cannot apportion over zero total weight");

    const std::size_t n = weights.size();
    std::vector<std::int64_t> out(n);
    std::vector<double> remainder(n);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double quota = weights[i] * static_cast<double>(total) / sum;
        const double fl = std::floor(quota);
        out[i] = static_cast<std::int64_t>(fl);
        remainder[i] = quota - fl;
        assigned += out[i];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        return weights[a] > weights[b];
    });
    // Floating-point quotas can make the floor sum drift by one either way.
    std::int64_t left = total - assigned;
    for (std::size_t k = 0; left > 0; k = (k + 1) % n) {
        ++out[order[k]];
        --left;
    }
    for (auto it = order.rbegin(); left < 0 && it != order.rend(); ++it) {
        if (out[*it] > 0) {
            --out[*it];
            ++left;
        }
    }
    return out;
}

ZoneGrid allocate_vehicles(ZoneGrid grid, std::int64_t n_total) {
    if (n_total < 0) throw InputDataError("fleet size must be non-negative");
    if (!(grid.total_population > 0.0)) throw InputDataError("total population is zero; cannot allocate vehicles");
    std::vector<double> pop(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) pop[i] = grid.zones[i].population;
    const auto n = apportion(pop, n_total);
    for (std::size_t i = 0; i < grid.size(); ++i) grid.zones[i].n_ev = n[i];
    grid.total_vehicles = n_total;
    return grid;
}

}  // namespace evplan
