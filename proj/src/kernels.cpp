#include "evplan/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "evplan/rng.hpp"
#include "evplan/zoning.hpp"

namespace evplan {

void set_thread_limit(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

double standard_normal(KeyedRng& rng) {
    for (;;) {
        const double u = 2.0 * rng.uniform() - 1.0;
        const double v = 2.0 * rng.uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

namespace kernels {

namespace {

void gravity_row(std::span<const double> attract, const double* d, double beta, double* out) {
    const std::size_t n = attract.size();
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        if (attract[j] > 0.0) dmin = std::min(dmin, d[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = attract[j] > 0.0 ? attract[j] * std::exp(-beta * (d[j] - dmin)) : 0.0;
        sum += out[j];
    }
    if (sum > 0.0)
        for (std::size_t j = 0; j < n; ++j) out[j] /= sum;
}

void add_interval(double* bins, std::size_t nbins, double step_h, double power, double a, double b) {
    if (b <= a) return;
    auto first = static_cast<std::size_t>(a / step_h);
    auto last = static_cast<std::size_t>(std::ceil(b / step_h));
    last = std::min(last, nbins);
    first = std::min(first, nbins - 1);
    for (std::size_t k = first; k < last; ++k) {
        const double lo = std::max(a, static_cast<double>(k) * step_h);
        const double hi = std::min(b, static_cast<double>(k + 1) * step_h);
        if (hi > lo) bins[k] += power * (hi - lo) / step_h;
    }
}

void bin_one(const Pulse& p, double* bins, std::size_t nbins, double step_h) {
    constexpr double day = 24.0;
    double remaining = p.duration_h;
    const double full_days = std::floor(remaining / day);
    if (full_days > 0.0) {
        for (std::size_t k = 0; k < nbins; ++k) bins[k] += p.power_kw * full_days;
        remaining -= full_days * day;
    }
    const double end = p.start_h + remaining;
    if (end <= day) {
        add_interval(bins, nbins, step_h, p.power_kw, p.start_h, end);
    } else {
        add_interval(bins, nbins, step_h, p.power_kw, p.start_h, day);
        add_interval(bins, nbins, step_h, p.power_kw, 0.0, end - day);
    }
}

// Pulses grouped by zone: offsets[z]..offsets[z+1] index into `order`.
struct ZoneIndex {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> order;
};

ZoneIndex group_by_zone(std::span<const Pulse> pulses, int n_zones) {
    ZoneIndex idx;
    idx.offsets.assign(static_cast<std::size_t>(n_zones) + 1, 0);
    for (const auto& p : pulses) ++idx.offsets[static_cast<std::size_t>(p.zone) + 1];
    for (int z = 0; z < n_zones; ++z) idx.offsets[z + 1] += idx.offsets[z];
    idx.order.resize(pulses.size());
    auto cursor = idx.offsets;
    for (std::size_t k = 0; k < pulses.size(); ++k) idx.order[cursor[static_cast<std::size_t>(pulses[k].zone)]++] = k;
    return idx;
}

}  // namespace

std::vector<int> locate_points(const ZoneGrid& grid, std::span<const LonLat> points, Execution exec) {
    std::vector<int> out(points.size(), -1);
    const auto n = static_cast<std::ptrdiff_t>(points.size());
    if (exec == Execution::serial) {
        for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = grid.locate(points[k]).value_or(-1);
        return out;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = grid.locate(points[k]).value_or(-1);
    return out;
}

void gravity_rows(std::span<const double> attractiveness, std::span<const double> distances, double beta,
                  std::span<double> out, Execution exec) {
    const auto n = static_cast<std::ptrdiff_t>(attractiveness.size());
    if (exec == Execution::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) gravity_row(attractiveness, &distances[i * n], beta, &out[i * n]);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) gravity_row(attractiveness, &distances[i * n], beta, &out[i * n]);
}

void bin_pulses(std::span<const Pulse> pulses, int n_zones, double step_h, std::span<double> per_zone,
                Execution exec) {
    const auto nbins = static_cast<std::size_t>(std::llround(24.0 / step_h));
    std::fill(per_zone.begin(), per_zone.end(), 0.0);
    if (exec == Execution::serial) {
        for (const auto& p : pulses) bin_one(p, &per_zone[static_cast<std::size_t>(p.zone) * nbins], nbins, step_h);
        return;
    }
    const auto idx = group_by_zone(pulses, n_zones);
#pragma omp parallel for schedule(dynamic, 4)
    for (int z = 0; z < n_zones; ++z) {
        double* bins = &per_zone[static_cast<std::size_t>(z) * nbins];
        for (std::size_t k = idx.offsets[z]; k < idx.offsets[z + 1]; ++k) bin_one(pulses[idx.order[k]], bins, nbins, step_h);
    }
}

std::vector<double> sum_zone_series(std::span<const double> per_zone, int n_zones, std::size_t nbins) {
    std::vector<double> total(nbins, 0.0);
    for (int z = 0; z < n_zones; ++z)
        for (std::size_t b = 0; b < nbins; ++b) total[b] += per_zone[static_cast<std::size_t>(z) * nbins + b];
    return total;
}

}  // namespace kernels
}  // namespace evplan
