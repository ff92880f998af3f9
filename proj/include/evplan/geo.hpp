#pragma once

#include <optional>
#include <vector>

namespace evplan {

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kPi = 3.14159265358979323846;

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
    bool operator==(const LonLat&) const = default;
};

/// Planar coordinates in kilometres in a local projected frame.
struct Xy {
    double x = 0.0;
    double y = 0.0;
};

double planar_distance(Xy a, Xy b);
double haversine_km(LonLat a, LonLat b);

/// Equirectangular projection about a reference point. Adequate at city
/// scale (scale error below 0.1% within ~30 km of the origin).
class LocalProjection {
public:
    LocalProjection() = default;
    explicit LocalProjection(LonLat origin);

    Xy forward(LonLat p) const;
    LonLat inverse(Xy p) const;
    LonLat origin() const { return origin_; }

private:
    LonLat origin_{};
    double km_per_deg_lon_ = 0.0;
    double km_per_deg_lat_ = 0.0;
};

using Ring = std::vector<LonLat>;

struct Polygon {
    Ring exterior;
    std::vector<Ring> holes;
};

/// Study-area outline: one or more polygons with optional holes.
struct BoundaryPolygon {
    std::vector<Polygon> parts;

    /// Throws InputDataError on open rings, < 4 vertices, non-finite
    /// coordinates or self-intersections.
    void validate() const;

    bool contains(LonLat p) const;
    /// Planar area in km^2 within the given projection.
    double area_km2(const LocalProjection& proj) const;
    /// Area-weighted centroid (planar in lon/lat, fine at city scale).
    LonLat centroid() const;

    struct Bounds {
        double min_lon, min_lat, max_lon, max_lat;
    };
    Bounds bounds() const;
};

/// Even-odd ray casting. Points exactly on an edge count as inside.
bool point_in_ring(const Ring& ring, LonLat p);
bool point_in_polygon(const Polygon& poly, LonLat p);

/// Signed shoelace area in the ring's own units (positive = counter-clockwise).
double signed_area(const Ring& ring);

}  // namespace evplan
