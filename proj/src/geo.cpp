#include "evplan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evplan/errors.hpp"

namespace evplan {

namespace {

constexpr double deg2rad(double d) { return d * kPi / 180.0; }

int orientation(LonLat a, LonLat b, LonLat c) {
    const double v = (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

bool on_segment(LonLat a, LonLat b, LonLat p) {
    return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
           std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

bool segments_intersect(LonLat p1, LonLat p2, LonLat q1, LonLat q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

void validate_ring(const Ring& ring, const std::string& what) {
    if (ring.size() < 4) throw InputDataError(what + ": ring needs at least 4 vertices");
    for (const auto& p : ring) {
        if (!std::isfinite(p.lon) || !std::isfinite(p.lat))
            throw InputDataError(what + ": non-finite coordinate");
    }
    if (!(ring.front() == ring.back())) throw InputDataError(what + ": ring is not closed");

    // Edges i and j may only touch when adjacent (sharing a vertex).
    const std::size_t n = ring.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1]))
                throw InputDataError(what + ": ring self-intersects (edges " + std::to_string(i) +
                                     " and " + std::to_string(j) + ")");
        }
    }
}

}  // namespace

double planar_distance(Xy a, Xy b) { return std::hypot(a.x - b.x, a.y - b.y); }

double haversine_km(LonLat a, LonLat b) {
    const double p1 = deg2rad(a.lat), p2 = deg2rad(b.lat);
    const double dp = p2 - p1, dl = deg2rad(b.lon - a.lon);
    const double h = std::sin(dp / 2) * std::sin(dp / 2) + std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

LocalProjection::LocalProjection(LonLat origin)
    : origin_(origin),
      km_per_deg_lon_(kEarthRadiusKm * deg2rad(1.0) * std::cos(deg2rad(origin.lat))),
      km_per_deg_lat_(kEarthRadiusKm * deg2rad(1.0)) {}

Xy LocalProjection::forward(LonLat p) const {
    return {(p.lon - origin_.lon) * km_per_deg_lon_, (p.lat - origin_.lat) * km_per_deg_lat_};
}

LonLat LocalProjection::inverse(Xy p) const {
    return {origin_.lon + p.x / km_per_deg_lon_, origin_.lat + p.y / km_per_deg_lat_};
}

double signed_area(const Ring& ring) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        acc += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
    return 0.5 * acc;
}

bool point_in_ring(const Ring& ring, LonLat p) {
    bool inside = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        const LonLat a = ring[i], b = ring[j];
        if (orientation(a, b, p) == 0 && on_segment(a, b, p)) return true;
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

bool point_in_polygon(const Polygon& poly, LonLat p) {
    if (!point_in_ring(poly.exterior, p)) return false;
    for (const auto& hole : poly.holes) {
        if (point_in_ring(hole, p)) {
            // The hole's own boundary still belongs to the polygon.
            bool on_edge = false;
            for (std::size_t i = 0; i + 1 < hole.size() && !on_edge; ++i)
                on_edge = orientation(hole[i], hole[i + 1], p) == 0 && on_segment(hole[i], hole[i + 1], p);
            if (!on_edge) return false;
        }
    }
    return true;
}

void BoundaryPolygon::validate() const {
    if (parts.empty()) throw InputDataError("boundary has no polygons");
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const std::string what = "boundary polygon " + std::to_string(k);
        validate_ring(parts[k].exterior, what + " exterior");
        for (const auto& h : parts[k].holes) validate_ring(h, what + " hole");
    }
}

bool BoundaryPolygon::contains(LonLat p) const {
    return std::any_of(parts.begin(), parts.end(), [&](const Polygon& poly) { return point_in_polygon(poly, p); });
}

double BoundaryPolygon::area_km2(const LocalProjection& proj) const {
    auto ring_area = [&](const Ring& r) {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            const Xy a = proj.forward(r[i]), b = proj.forward(r[i + 1]);
            acc += a.x * b.y - b.x * a.y;
        }
        return std::abs(0.5 * acc);
    };
    double total = 0.0;
    for (const auto& poly : parts) {
        total += ring_area(poly.exterior);
        for (const auto& h : poly.holes) total -= ring_area(h);
    }
    return total;
}

LonLat BoundaryPolygon::centroid() const {
    double ax = 0.0, ay = 0.0, area = 0.0;
    auto accumulate = [&](const Ring& r, double sign) {
        // Centroid relative to the first vertex to limit cancellation.
        const LonLat o = r.front();
        double a = 0.0, cx = 0.0, cy = 0.0;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            const double x0 = r[i].lon - o.lon, y0 = r[i].lat - o.lat;
            const double x1 = r[i + 1].lon - o.lon, y1 = r[i + 1].lat - o.lat;
            const double c = x0 * y1 - x1 * y0;
            a += c;
            cx += (x0 + x1) * c;
            cy += (y0 + y1) * c;
        }
        a *= 0.5;
        if (a == 0.0) return;
        const double s = (a > 0 ? 1.0 : -1.0) * sign;
        ax += s * (cx / 6.0 + o.lon * a);
        ay += s * (cy / 6.0 + o.lat * a);
        area += s * a;
    };
    for (const auto& poly : parts) {
        accumulate(poly.exterior, 1.0);
        for (const auto& h : poly.holes) accumulate(h, -1.0);
    }
    if (area == 0.0) {
        const auto b = bounds();
        return {0.5 * (b.min_lon + b.max_lon), 0.5 * (b.min_lat + b.max_lat)};
    }
    return {ax / area, ay / area};
}

BoundaryPolygon::Bounds BoundaryPolygon::bounds() const {
    Bounds b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& poly : parts) {
        for (const auto& p : poly.exterior) {
            b.min_lon = std::min(b.min_lon, p.lon);
            b.min_lat = std::min(b.min_lat, p.lat);
            b.max_lon = std::max(b.max_lon, p.lon);
            b.max_lat = std::max(b.max_lat, p.lat);
        }
    }
    return b;
}

}  // namespace evplan
