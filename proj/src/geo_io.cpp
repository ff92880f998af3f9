#include "evplan/geo_io.hpp"

#include <fstream>
#include <sstream>

#include "evplan/csv.hpp"
#include "evplan/errors.hpp"

namespace evplan {

namespace {

Ring parse_ring(const nlohmann::json& coords) {
    Ring ring;
    for (const auto& c : coords) {
        if (!c.is_array() || c.size() < 2) throw InputDataError("GeoJSON: bad coordinate");
        ring.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    return ring;
}

Polygon parse_polygon(const nlohmann::json& rings) {
    if (!rings.is_array() || rings.empty()) throw InputDataError("GeoJSON: polygon without rings");
    Polygon p;
    p.exterior = parse_ring(rings[0]);
    for (std::size_t k = 1; k < rings.size(); ++k) p.holes.push_back(parse_ring(rings[k]));
    return p;
}

void collect_polygons(const nlohmann::json& node, BoundaryPolygon& out) {
    const std::string type = node.value("type", "");
    if (type == "FeatureCollection") {
        for (const auto& f : node.at("features")) collect_polygons(f, out);
    } else if (type == "Feature") {
        if (node.contains("geometry") && !node["geometry"].is_null()) collect_polygons(node["geometry"], out);
    } else if (type == "Polygon") {
        out.parts.push_back(parse_polygon(node.at("coordinates")));
    } else if (type == "MultiPolygon") {
        for (const auto& rings : node.at("coordinates")) out.parts.push_back(parse_polygon(rings));
    } else if (type == "GeometryCollection") {
        for (const auto& g : node.at("geometries")) collect_polygons(g, out);
    }
}

std::string lower_ext(const std::filesystem::path& p) {
    std::string e = p.extension().string();
    for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return e;
}

}  // namespace

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputDataError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputDataError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const OrderedJson& doc, int indent) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputDataError("cannot write " + path.string());
    out << doc.dump(indent) << '\n';
}

BoundaryPolygon parse_boundary_geojson(const nlohmann::json& doc) {
    BoundaryPolygon b;
    try {
        collect_polygons(doc, b);
    } catch (const nlohmann::json::exception& e) {
        throw InputDataError(std::string("boundary GeoJSON: ") + e.what());
    }
    if (b.parts.empty()) throw InputDataError("boundary GeoJSON contains no Polygon or MultiPolygon");
    b.validate();
    return b;
}

BoundaryPolygon read_boundary_geojson(const std::filesystem::path& path) {
    return parse_boundary_geojson(read_json(path));
}

PopulationRaster read_esri_ascii(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputDataError("cannot open " + path.string());
    PopulationRaster r;
    double nodata = -9999.0;
    bool center_registered = false;
    std::string key;
    // Header: keyword/value pairs until the first numeric token.
    for (;;) {
        const auto mark = in.tellg();
        if (!(in >> key)) throw InputDataError(path.string() + ": truncated header");
        std::string k = key;
        for (auto& c : k) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        double value = 0.0;
        if (k == "ncols" || k == "nrows" || k == "xllcorner" || k == "yllcorner" || k == "xllcenter" ||
            k == "yllcenter" || k == "cellsize" || k == "nodata_value") {
            if (!(in >> value)) throw InputDataError(path.string() + ": bad header value for " + key);
            if (k == "ncols") r.ncols = static_cast<std::size_t>(value);
            if (k == "nrows") r.nrows = static_cast<std::size_t>(value);
            if (k == "xllcorner" || k == "xllcenter") r.lower_left.lon = value;
            if (k == "yllcorner" || k == "yllcenter") r.lower_left.lat = value;
            if (k == "xllcenter" || k == "yllcenter") center_registered = true;
            if (k == "cellsize") r.cell_deg = value;
            if (k == "nodata_value") nodata = value;
        } else {
            in.seekg(mark);
            break;
        }
    }
    if (center_registered) {
        r.lower_left.lon -= 0.5 * r.cell_deg;
        r.lower_left.lat -= 0.5 * r.cell_deg;
    }
    r.counts.resize(r.ncols * r.nrows);
    for (auto& v : r.counts) {
        if (!(in >> v)) throw InputDataError(path.string() + ": fewer cells than ncols*nrows");
        if (v == nodata) v = 0.0;
    }
    r.validate();
    return r;
}

std::vector<WeightedPoint> read_population_csv(const std::filesystem::path& path) {
    const auto t = csv::read(path);
    const int lon = t.column("lon"), lat = t.column("lat"), count = t.column("count");
    if (lon < 0 || lat < 0 || count < 0) throw InputDataError(path.string() + ": need columns lon,lat,count");
    std::vector<WeightedPoint> out;
    out.reserve(t.rows.size());
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const std::string ctx = path.string() + ":" + std::to_string(t.line_numbers[k]);
        out.push_back({{csv::to_double(t.rows[k][lon], ctx), csv::to_double(t.rows[k][lat], ctx)},
                       csv::to_double(t.rows[k][count], ctx)});
    }
    return out;
}

PointSet read_points(const std::filesystem::path& path, PointKind kind) {
    PointSet set;
    set.kind = kind;
    const auto ext = lower_ext(path);
    if (ext == ".geojson" || ext == ".json") {
        const auto doc = read_json(path);
        auto add_point = [&](const nlohmann::json& geom, const std::string& label) {
            if (geom.value("type", "") == "Point") {
                const auto& c = geom.at("coordinates");
                set.points.push_back({c[0].get<double>(), c[1].get<double>()});
                set.labels.push_back(label);
            } else if (geom.value("type", "") == "MultiPoint") {
                for (const auto& c : geom.at("coordinates")) {
                    set.points.push_back({c[0].get<double>(), c[1].get<double>()});
                    set.labels.push_back(label);
                }
            }
        };
        try {
            if (doc.value("type", "") == "FeatureCollection") {
                for (const auto& f : doc.at("features")) {
                    std::string label;
                    if (f.contains("properties") && f["properties"].is_object() && f["properties"].contains("name") &&
                        f["properties"]["name"].is_string())
                        label = f["properties"]["name"].get<std::string>();
                    if (f.contains("geometry") && !f["geometry"].is_null()) add_point(f["geometry"], label);
                }
            } else {
                add_point(doc, "");
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputDataError(path.string() + ": " + e.what());
        }
        return set;
    }

    const auto t = csv::read(path);
    const int lon = t.column("lon"), lat = t.column("lat"), name = t.column("name");
    if (lon < 0 || lat < 0) throw InputDataError(path.string() + ": need columns lon,lat[,name]");
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const std::string ctx = path.string() + ":" + std::to_string(t.line_numbers[k]);
        set.points.push_back({csv::to_double(t.rows[k][lon], ctx), csv::to_double(t.rows[k][lat], ctx)});
        set.labels.push_back(name >= 0 ? t.rows[k][name] : std::string());
    }
    return set;
}

OrderedJson zones_to_geojson(const ZoneGrid& grid) {
    OrderedJson features = OrderedJson::array();
    for (const auto& z : grid.zones) {
        OrderedJson ring = OrderedJson::array();
        for (const auto& p : z.polygon) ring.push_back({p.lon, p.lat});
        OrderedJson f;
        f["type"] = "Feature";
        f["properties"] = {{"id", z.id},
                           {"population", z.population},
                           {"workplaces", z.workplaces},
                           {"pois", z.pois},
                           {"n_ev", z.n_ev}};
        f["geometry"] = {{"type", "Polygon"}, {"coordinates", OrderedJson::array({ring})}};
        features.push_back(std::move(f));
    }
    OrderedJson doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = std::move(features);
    return doc;
}

}  // namespace evplan
