#include "evplan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evplan/errors.hpp"
#include "evplan/timeutil.hpp"

namespace evplan {

namespace {

void check_grid(std::span<const double> pv, std::span<const double> ev) {
    if (pv.size() != ev.size()) throw InputDataError("PV and EV series are on different time grids");
}

double sum_min(std::span<const double> pv, std::span<const double> ev) {
    double s = 0.0;
    for (std::size_t k = 0; k < pv.size(); ++k) s += std::min(pv[k], ev[k]);
    return s;
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

std::optional<double> self_sufficiency(std::span<const double> pv, std::span<const double> ev) {
    check_grid(pv, ev);
    const double e = sum(ev);
    if (!(e > 0.0)) return std::nullopt;
    return sum_min(pv, ev) / e;
}

std::optional<double> self_consumption(std::span<const double> pv, std::span<const double> ev) {
    check_grid(pv, ev);
    const double p = sum(pv);
    if (!(p > 0.0)) return std::nullopt;
    return sum_min(pv, ev) / p;
}

std::optional<double> energy_coverage(std::span<const double> pv, std::span<const double> ev) {
    check_grid(pv, ev);
    const double e = sum(ev);
    if (!(e > 0.0)) return std::nullopt;
    return sum(pv) / e;
}

std::vector<double> pv_day_series(const PVProfile& pv, std::int64_t local_day, double step_h) {
    const auto nbins = static_cast<std::size_t>(std::llround(24.0 / step_h));
    std::vector<double> out(nbins, 0.0);
    if (pv.t.empty()) return out;
    const double day0 = static_cast<double>(local_day) * 86400.0 - pv.utc_offset_h * 3600.0;
    for (std::size_t b = 0; b < nbins; ++b) {
        const double t = day0 + (static_cast<double>(b) + 0.5) * step_h * 3600.0;
        const auto it = std::upper_bound(pv.t.begin(), pv.t.end(), t);
        if (it == pv.t.begin() || it == pv.t.end()) {
            if (it != pv.t.end() && *it == t) out[b] = pv.kw_per_kwp[0];
            continue;
        }
        const auto k = static_cast<std::size_t>(it - pv.t.begin());
        const double t0 = pv.t[k - 1], t1 = pv.t[k];
        const double w = (t - t0) / (t1 - t0);
        out[b] = pv.kw_per_kwp[k - 1] * (1.0 - w) + pv.kw_per_kwp[k] * w;
    }
    return out;
}

std::vector<std::int64_t> weekdays(int year, std::span<const std::int64_t> holidays) {
    std::vector<std::int64_t> out;
    const auto first = timeutil::days_from_civil(year, 1, 1);
    const auto last = timeutil::days_from_civil(year + 1, 1, 1);
    for (auto d = first; d < last; ++d) {
        if (timeutil::weekday(d) >= 5) continue;
        if (std::find(holidays.begin(), holidays.end(), d) != holidays.end()) continue;
        out.push_back(d);
    }
    return out;
}

double quantile(std::span<const double> s, double q) {
    if (s.empty()) return std::nan("");
    const double h = (static_cast<double>(s.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

BoxStats box_stats(std::vector<double> v) {
    BoxStats b;
    b.n = v.size();
    if (v.empty()) return b;
    std::sort(v.begin(), v.end());
    b.mean = sum(v) / static_cast<double>(v.size());
    b.median = quantile(v, 0.5);
    b.q1 = quantile(v, 0.25);
    b.q3 = quantile(v, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo = b.q1 - 1.5 * iqr, hi = b.q3 + 1.5 * iqr;
    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    for (double x : v)
        if (x >= lo) {
            b.whisker_low = x;
            break;
        }
    for (auto it = v.rbegin(); it != v.rend(); ++it)
        if (*it <= hi) {
            b.whisker_high = *it;
            break;
        }
    for (double x : v)
        if (x < lo || x > hi) b.outliers.push_back(x);
    return b;
}

std::vector<CapacityResult> capacity_sweep(const PVProfile& pv, const DailyLoadFn& ev_load,
                                           std::span<const double> kwp_per_ev, double n_ev,
                                           std::span<const std::int64_t> days, double step_h) {
    if (!(n_ev > 0.0)) throw ConfigError("capacity sweep needs a positive fleet size");
    std::vector<CapacityResult> out(kwp_per_ev.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        if (!(kwp_per_ev[c] >= 0.0)) throw ConfigError("PV capacities must be non-negative");
        out[c].kwp_per_ev = kwp_per_ev[c];
        out[c].days.resize(days.size());
    }
    // Days are independent; each writes only its own slot.
    const auto nd = static_cast<std::ptrdiff_t>(days.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < nd; ++i) {
        const auto di = static_cast<std::size_t>(i);
        const std::vector<double> ev = ev_load(days[di], di);
        const std::vector<double> unit = pv_day_series(pv, days[di], step_h);
        std::vector<double> p(unit.size());
        for (std::size_t c = 0; c < out.size(); ++c) {
            const double kwp = kwp_per_ev[c] * n_ev;
            for (std::size_t b = 0; b < unit.size(); ++b) p[b] = unit[b] * kwp;
            DailyIndicator& d = out[c].days[di];
            d.day = days[di];
            d.ss = self_sufficiency(p, ev);
            d.sc = self_consumption(p, ev);
            d.coverage = energy_coverage(p, ev);
            d.pv_kwh = sum(p) * step_h;
            d.ev_kwh = sum(ev) * step_h;
        }
    }
    for (auto& r : out) {
        std::vector<double> ss;
        std::array<double, 12> ms{}, mq{};
        double cov = 0.0;
        std::size_t ncov = 0;
        for (const auto& d : r.days) {
            if (d.coverage) {
                cov += *d.coverage;
                ++ncov;
            }
            if (!d.ss) continue;
            ss.push_back(*d.ss);
            const auto m = timeutil::civil_from_days(d.day).month - 1;
            ms[m] += *d.ss;
            mq[m] += *d.ss * *d.ss;
            ++r.monthly[m].n;
        }
        r.ss_box = box_stats(ss);
        r.mean_coverage = ncov ? cov / static_cast<double>(ncov) : 0.0;
        for (std::size_t m = 0; m < 12; ++m) {
            auto& s = r.monthly[m];
            s.month = static_cast<int>(m) + 1;
            if (s.n == 0) continue;
            const auto n = static_cast<double>(s.n);
            s.mean = ms[m] / n;
            s.sd = s.n > 1 ? std::sqrt(std::max(0.0, (mq[m] - n * s.mean * s.mean) / (n - 1.0))) : 0.0;
        }
    }
    return out;
}

void FleetDynamics::validate() const {
    if (!(lambda > 0.0)) throw ConfigError("fleet renewal rate must be > 0");
    if (!(sigma >= 0.0 && sigma <= 1.0 && s0 >= 0.0 && s0 <= 1.0))
        throw ConfigError("fleet shares must lie in [0,1]");
}

double fleet_share(double t, const FleetDynamics& d) {
    d.validate();
    return d.sigma + (d.s0 - d.sigma) * std::exp(-d.lambda * t);
}

double time_to_share(double target, const FleetDynamics& d) {
    d.validate();
    if (!(target > d.s0)) throw ConfigError("target share must exceed the initial share");
    if (!(target < d.sigma)) throw ConfigError("target share is unreachable: it must be below the new-registration share");
    return std::log((d.sigma - d.s0) / (d.sigma - target)) / d.lambda;
}

double ReferenceLoad::peak_mw() const {
    return city_mw.empty() ? 0.0 : *std::max_element(city_mw.begin(), city_mw.end());
}

double ReferenceLoad::daily_energy_mwh() const {
    // hourly samples of a periodic day
    return city_mw.empty() ? 0.0 : sum(city_mw) * 24.0 / static_cast<double>(city_mw.size());
}

ReferenceLoad scale_reference_load(std::span<const double> national, double share) {
    if (national.empty()) throw InputDataError("national load curve is empty");
    if (!(share > 0.0)) throw ConfigError("load share must be positive");
    for (double v : national)
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputDataError("national load curve has invalid values");
    ReferenceLoad r;
    r.national_mw.assign(national.begin(), national.end());
    r.share = share;
    r.city_mw.reserve(national.size());
    for (double v : national) r.city_mw.push_back(v * share);
    return r;
}

ReferenceLoad scale_reference_load(std::span<const double> national, double study_population,
                                   double region_population, double region_peak_mw) {
    if (!(study_population > 0.0 && region_population > 0.0)) throw ConfigError("populations must be positive");
    if (!(region_peak_mw > 0.0)) throw ConfigError("regional peak must be positive");
    if (national.empty()) throw InputDataError("national load curve is empty");
    const double national_peak = *std::max_element(national.begin(), national.end());
    if (!(national_peak > 0.0)) throw InputDataError("national load curve has no positive value");
    return scale_reference_load(national, region_peak_mw / national_peak * study_population / region_population);
}

double ev_uptake_percent(double ev_mwh, double city_mwh) {
    if (!(city_mwh > 0.0)) throw InputDataError("city daily energy must be positive");
    return 100.0 * ev_mwh / city_mwh;
}

double ev_uptake_percent(double ev_mwh, const ReferenceLoad& ref) { return ev_uptake_percent(ev_mwh, ref.daily_energy_mwh()); }

nlohmann::ordered_json box_stats_to_json(const BoxStats& b) {
    return {{"n", b.n},           {"mean", b.mean},
            {"median", b.median}, {"q1", b.q1},
            {"q3", b.q3},         {"whisker_low", b.whisker_low},
            {"whisker_high", b.whisker_high}, {"outliers", b.outliers}};
}

}  // namespace evplan
