#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evplan/geo.hpp"

namespace evplan {

/// Gridded person counts. Row 0 is the northernmost row (ESRI ASCII order).
struct PopulationRaster {
    LonLat lower_left;  ///< lower-left corner of the grid
    double cell_deg = 0.0;
    std::size_t ncols = 0;
    std::size_t nrows = 0;
    std::vector<double> counts;  ///< nrows * ncols, row-major

    double at(std::size_t row, std::size_t col) const { return counts[row * ncols + col]; }
    LonLat cell_center(std::size_t row, std::size_t col) const;
    void validate() const;
};

struct WeightedPoint {
    LonLat pos;
    double weight = 0.0;
};

enum class PointKind { workplace, poi };

struct PointSet {
    PointKind kind = PointKind::poi;
    std::vector<LonLat> points;
    std::vector<std::string> labels;  ///< empty or one per point
};

struct TrafficZone {
    int id = 0;
    int row = 0;  ///< grid row, 0 = southernmost
    int col = 0;
    LonLat centroid;
    Ring polygon;
    double population = 0.0;
    std::int64_t workplaces = 0;
    std::int64_t pois = 0;
    std::int64_t n_ev = 0;
};

/// Regular square-cell zoning of a study area. Cells are axis-aligned in a
/// local equirectangular frame centred on the boundary centroid; a cell is
/// kept when its centre lies inside the boundary. Zone ids are row-major
/// over the kept cells (south to north, west to east).
class ZoneGrid {
public:
    double cell_size_km = 0.0;
    LocalProjection projection;
    Xy origin;  ///< lower-left corner of cell (0, 0) in the projected frame
    int nrows = 0;
    int ncols = 0;
    std::vector<TrafficZone> zones;
    std::vector<int> cell_to_zone;  ///< nrows * ncols, -1 for discarded cells

    double total_population = 0.0;
    std::int64_t total_workplaces = 0;
    std::int64_t total_pois = 0;
    std::int64_t total_vehicles = 0;

    std::size_t size() const { return zones.size(); }
    double cell_area_km2() const { return cell_size_km * cell_size_km; }

    /// Zone containing the point. A point on a shared edge or corner goes to
    /// the lowest zone id among the cells touching it.
    std::optional<int> locate(LonLat p) const;

    Xy centroid_xy(int zone) const;
};

/// Result of assigning points to zones.
struct PointAssignment {
    std::vector<std::int64_t> counts;  ///< per zone
    std::int64_t outside = 0;          ///< points not in any zone
};

ZoneGrid build_zone_grid(const BoundaryPolygon& boundary, double cell_size_km);

/// Adds each raster cell's count to the zone containing its centre.
/// Returns the grid with population fields (re)computed from scratch.
ZoneGrid aggregate_population(ZoneGrid grid, const PopulationRaster& raster);
ZoneGrid aggregate_population(ZoneGrid grid, std::span<const WeightedPoint> cells);

/// Counts workplaces or POIs per zone. `report` (optional) receives the
/// per-zone counts and how many points fell outside every zone.
ZoneGrid aggregate_points(ZoneGrid grid, const PointSet& points, PointAssignment* report = nullptr);

/// Proportional vehicle allocation with largest-remainder rounding so the
/// total is exact. Ties in the remainder go to the larger population, then
/// the lower zone id.
ZoneGrid allocate_vehicles(ZoneGrid grid, std::int64_t n_total);

/// Largest-remainder apportionment of `total` over non-negative weights.
std::vector<std::int64_t> apportion(std::span<const double> weights, std::int64_t total);

}  // namespace evplan
