#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "evplan/zoning.hpp"

namespace evplan {

using OrderedJson = nlohmann::ordered_json;

/// Polygon or MultiPolygon; accepts a bare geometry, a Feature, or a
/// FeatureCollection (all polygonal features are merged).
BoundaryPolygon parse_boundary_geojson(const nlohmann::json& doc);
BoundaryPolygon read_boundary_geojson(const std::filesystem::path& path);

/// ESRI ASCII grid (ncols/nrows/xllcorner/yllcorner/cellsize[/NODATA_value]).
/// NODATA cells read as 0.
PopulationRaster read_esri_ascii(const std::filesystem::path& path);

/// CSV with columns lon,lat,count.
std::vector<WeightedPoint> read_population_csv(const std::filesystem::path& path);

/// CSV (lon,lat[,name]) or GeoJSON points, chosen by file extension.
PointSet read_points(const std::filesystem::path& path, PointKind kind);

/// FeatureCollection with properties {id, population, workplaces, pois, n_ev}.
OrderedJson zones_to_geojson(const ZoneGrid& grid);

/// Writes JSON with a trailing newline; `indent` < 0 for compact output.
void write_json(const std::filesystem::path& path, const OrderedJson& doc, int indent = 1);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace evplan
