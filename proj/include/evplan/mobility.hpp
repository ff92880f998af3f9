#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evplan/geo.hpp"
#include "evplan/kernels.hpp"
#include "evplan/zoning.hpp"

namespace evplan {

/// Road-distance oracle between coordinates.
class DistanceProvider {
public:
    virtual ~DistanceProvider() = default;

    /// Row-major |sources| x |destinations| road distances in km; nullopt
    /// marks an unroutable pair. May throw ServiceError for a whole batch.
    virtual std::vector<std::optional<double>> matrix(std::span<const LonLat> sources,
                                                      std::span<const LonLat> destinations) = 0;
};

enum class DistanceSource : std::uint8_t { routed, circuity, intra_zonal };

const char* to_string(DistanceSource s);

struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> km;              ///< n*n, row-major (origin, destination)
    std::vector<DistanceSource> source;  ///< provenance per entry

    double at(std::size_t i, std::size_t j) const { return km[i * n + j]; }
    DistanceSource source_at(std::size_t i, std::size_t j) const { return source[i * n + j]; }
};

struct CircuityModel {
    double factor = 1.0;           ///< road / straight-line, >= 1
    std::size_t samples = 0;       ///< successfully routed pairs used in the fit
    double residual_rms_km = 0.0;  ///< RMS of road - factor*euclid
};

struct TripMatrix {
    std::size_t n = 0;
    std::vector<double> p;  ///< n*n, rows sum to 1 for origins with destinations
    double beta = 0.0;      ///< decay, 1/km
    std::vector<double> normalization;  ///< c_i

    double at(std::size_t i, std::size_t j) const { return p[i * n + j]; }
};

/// One entry of a zone's two-way daily distance distribution.
struct DistanceWeight {
    double two_way_km = 0.0;
    double weight = 0.0;
};

struct MobilityResult {
    std::vector<double> vkm_out;  ///< km/day leaving each zone (round trips)
    std::vector<double> vkm_in;   ///< km/day arriving in each zone
    std::vector<std::vector<DistanceWeight>> distance_distribution;  ///< per origin zone
    double fleet_mean_daily_km = 0.0;  ///< sum(vkm_out) / fleet size
    double extra_daily_km = 0.0;       ///< per-vehicle offset folded into the above
};

/// Self-calibrated decay: 0.3 * S^-0.18 with S the zone area in km^2.
double compute_beta(double cell_area_km2);

/// Intra-zonal trip length: half the radius of the equal-area circle.
double intra_zonal_distance(double cell_area_km2);

/// Samples random point pairs inside the boundary, routes them, and fits
/// road = k * euclid through the origin. k is clamped to >= 1.
CircuityModel estimate_circuity(const BoundaryPolygon& boundary, DistanceProvider& router, std::size_t n_samples,
                                std::uint64_t seed);

/// Centroid-to-centroid distances. Routed where the router answers, circuity
/// fallback elsewhere (including when the router throws or is absent).
DistanceMatrix distance_matrix(const ZoneGrid& grid, DistanceProvider* router, const CircuityModel& circuity);

/// Gravity trip distribution with workplaces as attractiveness.
TripMatrix trip_probabilities(const ZoneGrid& grid, const DistanceMatrix& distances, double beta,
                              Execution exec = Execution::parallel);

/// Same model on raw arrays; used by `trip_probabilities`.
TripMatrix trip_probabilities(std::span<const double> attractiveness, const DistanceMatrix& distances, double beta,
                              Execution exec = Execution::parallel);

/// Round-trip vehicle-km per zone. `extra_daily_km` is added per vehicle to
/// both the outgoing and incoming totals of its home zone and to every entry
/// of the distance distribution.
MobilityResult vkm(const ZoneGrid& grid, const TripMatrix& trips, const DistanceMatrix& distances,
                   double extra_daily_km = 0.0);

/// Histogram of two-way daily distances over the fleet (weights = vehicles).
struct DistanceHistogram {
    double bin_km = 0.0;
    std::vector<double> vehicles;  ///< expected vehicles per bin
};
DistanceHistogram distance_histogram(const ZoneGrid& grid, const MobilityResult& mob, double bin_km);

}  // namespace evplan
