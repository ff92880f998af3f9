#include "evplan/mobility.hpp"

#include <cmath>
#include <numeric>

#include "evplan/errors.hpp"
#include "evplan/rng.hpp"

namespace evplan {

const char* to_string(DistanceSource s) {
    switch (s) {
        case DistanceSource::routed: return "routed";
        case DistanceSource::circuity: return "circuity";
        case DistanceSource::intra_zonal: return "intra_zonal";
    }
    return "?";
}

double compute_beta(double cell_area_km2) {
    if (!(cell_area_km2 > 0.0)) throw InputDataError("zone area must be positive");
    return 0.3 * std::pow(cell_area_km2, -0.18);
}

double intra_zonal_distance(double cell_area_km2) { return 0.5 * std::sqrt(cell_area_km2 / kPi); }

CircuityModel estimate_circuity(const BoundaryPolygon& boundary, DistanceProvider& router, std::size_t n_samples,
                                std::uint64_t seed) {
    if (n_samples < 10) throw ConfigError("circuity estimation needs at least 10 samples");
    boundary.validate();
    const LocalProjection proj(boundary.centroid());
    const auto bb = boundary.bounds();
    KeyedRng rng(seed, RngPurpose::circuity);

    auto draw_inside = [&]() {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            const LonLat p{bb.min_lon + rng.uniform() * (bb.max_lon - bb.min_lon),
                           bb.min_lat + rng.uniform() * (bb.max_lat - bb.min_lat)};
            if (boundary.contains(p)) return p;
        }
        throw InputDataError("could not sample points inside the boundary");
    };

    std::vector<double> euclid, road;
    std::size_t failures = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const LonLat a = draw_inside();
        const LonLat b = draw_inside();
        std::optional<double> d;
        try {
            const auto m = router.matrix(std::span(&a, 1), std::span(&b, 1));
            if (!m.empty()) d = m.front();
        } catch (const std::exception&) {
            d.reset();
        }
        if (!d || !std::isfinite(*d) || *d < 0.0) {
            ++failures;
            continue;
        }
        euclid.push_back(planar_distance(proj.forward(a), proj.forward(b)));
        road.push_back(*d);
    }
    if (2 * failures > n_samples)
        throw ServiceError("routing failed for " + std::to_string(failures) + " of " + std::to_string(n_samples) +
                           " circuity samples");

    double see = 0.0, ser = 0.0;
    for (std::size_t k = 0; k < euclid.size(); ++k) {
        see += euclid[k] * euclid[k];
        ser += euclid[k] * road[k];
    }
    if (!(see > 0.0)) throw InputDataError("circuity samples are all identical points");

    CircuityModel model;
    model.factor = ser / see;
    model.samples = euclid.size();
    double rss = 0.0;
    for (std::size_t k = 0; k < euclid.size(); ++k) {
        const double r = road[k] - model.factor * euclid[k];
        rss += r * r;
    }
    model.residual_rms_km = std::sqrt(rss / static_cast<double>(euclid.size()));
    model.factor = std::max(1.0, model.factor);
    return model;
}

DistanceMatrix distance_matrix(const ZoneGrid& grid, DistanceProvider* router, const CircuityModel& circuity) {
    const std::size_t n = grid.size();
    if (n == 0) throw InputDataError("distance matrix needs at least one zone");
    if (!(circuity.factor >= 1.0)) throw ConfigError("circuity factor must be >= 1");

    std::vector<LonLat> centroids(n);
    for (std::size_t i = 0; i < n; ++i) centroids[i] = grid.zones[i].centroid;

    std::vector<std::optional<double>> routed;
    if (router) {
        try {
            routed = router->matrix(centroids, centroids);
        } catch (const std::exception&) {
            routed.clear();
        }
        if (routed.size() != n * n) routed.clear();
    }

    DistanceMatrix dm;
    dm.n = n;
    dm.km.resize(n * n);
    dm.source.resize(n * n);
    const double intra = intra_zonal_distance(grid.cell_area_km2());
    for (std::size_t i = 0; i < n; ++i) {
        const Xy ci = grid.centroid_xy(static_cast<int>(i));
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t k = i * n + j;
            if (i == j) {
                dm.km[k] = intra;
                dm.source[k] = DistanceSource::intra_zonal;
                continue;
            }
            if (!routed.empty() && routed[k] && std::isfinite(*routed[k]) && *routed[k] >= 0.0) {
                dm.km[k] = *routed[k];
                dm.source[k] = DistanceSource::routed;
            } else {
                dm.km[k] = circuity.factor * planar_distance(ci, grid.centroid_xy(static_cast<int>(j)));
                dm.source[k] = DistanceSource::circuity;
            }
        }
    }
    return dm;
}

TripMatrix trip_probabilities(std::span<const double> attractiveness, const DistanceMatrix& distances, double beta,
                              Execution exec) {
    const std::size_t n = attractiveness.size();
    if (distances.n != n) throw InputDataError("distance matrix does not match the zone count");
    if (!(beta > 0.0)) throw ConfigError("decay parameter must be positive");
    double total = 0.0;
    for (double a : attractiveness) {
        if (a < 0.0 || !std::isfinite(a)) throw InputDataError("attractiveness must be finite and non-negative");
        total += a;
    }
    if (!(total > 0.0)) throw InputDataError("no destinations: every zone has zero attractiveness");

    TripMatrix t;
    t.n = n;
    t.beta = beta;
    t.p.assign(n * n, 0.0);
    kernels::gravity_rows(attractiveness, distances.km, beta, t.p, exec);
    t.normalization.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += attractiveness[j] * std::exp(-beta * distances.at(i, j));
        t.normalization[i] = 1.0 / s;
    }
    return t;
}

TripMatrix trip_probabilities(const ZoneGrid& grid, const DistanceMatrix& distances, double beta, Execution exec) {
    std::vector<double> a(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) a[j] = static_cast<double>(grid.zones[j].workplaces);
    return trip_probabilities(a, distances, beta, exec);
}

MobilityResult vkm(const ZoneGrid& grid, const TripMatrix& trips, const DistanceMatrix& distances,
                   double extra_daily_km) {
    const std::size_t n = grid.size();
    if (trips.n != n || distances.n != n) throw InputDataError("trip/distance matrices do not match the zone count");
    if (extra_daily_km < 0.0) throw ConfigError("extra daily distance must be non-negative");

    MobilityResult r;
    r.extra_daily_km = extra_daily_km;
    r.vkm_out.assign(n, 0.0);
    r.vkm_in.assign(n, 0.0);
    r.distance_distribution.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ni = static_cast<double>(grid.zones[i].n_ev);
        double out = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double p = trips.at(i, j);
            if (p > 0.0) r.distance_distribution[i].push_back({2.0 * distances.at(i, j) + extra_daily_km, p});
            if (j == i) continue;
            out += p * ni * distances.at(i, j);
        }
        r.vkm_out[i] = 2.0 * out + ni * extra_daily_km;
    }
    // Incoming trips use the origin -> destination distance actually driven.
    for (std::size_t j = 0; j < n; ++j) {
        double in = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            in += trips.at(i, j) * static_cast<double>(grid.zones[i].n_ev) * distances.at(i, j);
        }
        r.vkm_in[j] = 2.0 * in + static_cast<double>(grid.zones[j].n_ev) * extra_daily_km;
    }
    std::int64_t fleet = 0;
    for (const auto& z : grid.zones) fleet += z.n_ev;
    const double total = std::accumulate(r.vkm_out.begin(), r.vkm_out.end(), 0.0);
    r.fleet_mean_daily_km = fleet > 0 ? total / static_cast<double>(fleet) : 0.0;
    return r;
}

DistanceHistogram distance_histogram(const ZoneGrid& grid, const MobilityResult& mob, double bin_km) {
    if (!(bin_km > 0.0)) throw ConfigError("histogram bin width must be positive");
    DistanceHistogram h;
    h.bin_km = bin_km;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ni = static_cast<double>(grid.zones[i].n_ev);
        for (const auto& dw : mob.distance_distribution[i]) {
            const auto bin = static_cast<std::size_t>(dw.two_way_km / bin_km);
            if (bin >= h.vehicles.size()) h.vehicles.resize(bin + 1, 0.0);
            h.vehicles[bin] += ni * dw.weight;
        }
    }
    return h;
}

}  // namespace evplan
