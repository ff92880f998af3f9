#include "evplan/demand_temporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "evplan/csv.hpp"
#include "evplan/errors.hpp"
#include "evplan/timeutil.hpp"

namespace evplan {

namespace {

constexpr double kDay = 24.0;
constexpr double kUsableFraction = 0.8;

double wrap_hours(double t) {
    double w = std::fmod(t, kDay);
    if (w < 0.0) w += kDay;
    if (w >= kDay) w = 0.0;  // fmod rounding at exactly -0 / 24
    return w;
}

int pick_cdf(std::span<const double> cdf, double u) {
    const double target = u * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    auto k = static_cast<std::size_t>(it - cdf.begin());
    if (k >= cdf.size()) {
        // target rounded up to the total: fall back to the last entry with weight
        k = cdf.size() - 1;
        while (k > 0 && cdf[k] == cdf[k - 1]) --k;
    }
    return static_cast<int>(k);
}

double sample_power(const std::vector<ChargerOption>& opts, double u) {
    double acc = 0.0;
    for (const auto& o : opts) {
        acc += o.probability;
        if (u < acc) return o.power_kw;
    }
    return opts.back().power_kw;
}

double sample_sd(double sum, double sum_sq, int n) {
    if (n < 2) return 0.0;
    const double mean = sum / n;
    const double var = (sum_sq - n * mean * mean) / (n - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace

const char* to_string(Location l) {
    switch (l) {
        case Location::home: return "home";
        case Location::work: return "work";
        case Location::poi: return "poi";
    }
    return "?";
}

void ChargerMix::validate(const ChargingShares& shares) const {
    const std::array<double, 3> f{shares.home, shares.work, shares.poi};
    for (auto loc : kLocations) {
        const auto& opts = at(loc);
        if (opts.empty()) {
            if (f[index(loc)] > 0.0)
                throw ConfigError(std::string("charger mix for '") + to_string(loc) + "' is empty but its share is non-zero");
            continue;
        }
        double p = 0.0;
        for (const auto& o : opts) {
            if (!(o.power_kw > 0.0)) throw ConfigError(std::string("charger power at '") + to_string(loc) + "' must be > 0");
            if (o.probability < 0.0) throw ConfigError("charger probabilities must be non-negative");
            p += o.probability;
        }
        if (std::abs(p - 1.0) > 1e-9)
            throw ConfigError(std::string("charger probabilities at '") + to_string(loc) + "' must sum to 1");
    }
}

double ChargerMix::mean_power(Location l) const {
    double m = 0.0;
    for (const auto& o : at(l)) m += o.power_kw * o.probability;
    return m;
}

ChargerMix ChargerMix::addis_default() {
    ChargerMix m;
    m.at(Location::home) = {{3.2, 0.45}, {7.4, 0.40}, {11.0, 0.15}};
    m.at(Location::work) = {{7.4, 0.25}, {11.0, 0.50}, {22.0, 0.25}};
    m.at(Location::poi) = {{7.4, 0.15}, {11.0, 0.15}, {22.0, 0.55}, {50.0, 0.15}};
    return m;
}

ChargerMix ChargerMix::single_power(double power_kw) {
    ChargerMix m;
    for (auto loc : kLocations) m.at(loc) = {{power_kw, 1.0}};
    return m;
}

void SocThreshold::validate() const {
    if (!(sd >= 0.0)) throw ConfigError("SoC threshold sd must be non-negative");
    if (!(min >= 0.0 && max <= 1.0 && min < max)) throw ConfigError("SoC threshold bounds must satisfy 0 <= min < max <= 1");
    if (bounding == Bounding::reject && sd == 0.0 && !(mean > min && mean < max)) throw ConfigError("SoC threshold mean lies outside its bounds");
}

void ChargingScenario::validate() const {
    shares.validate();
    chargers.validate(shares);
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("charging efficiency must be in (0,1]");
    for (const auto& a : {arrivals.home, arrivals.work})
        if (!(a.sd_h >= 0.0)) throw ConfigError("arrival sd must be non-negative");
}

double LoadProfile::peak_kw() const { return total.empty() ? 0.0 : total[peak_bin()]; }

std::size_t LoadProfile::peak_bin() const {
    return static_cast<std::size_t>(std::max_element(total.begin(), total.end()) - total.begin());
}

double LoadProfile::energy_kwh() const { return std::accumulate(total.begin(), total.end(), 0.0) * step_h; }

std::span<const double> LoadProfile::zone(int z) const {
    return std::span<const double>(per_zone).subspan(static_cast<std::size_t>(z) * nbins(), nbins());
}

DestinationSampler::DestinationSampler(const TripMatrix& trips, const ZoneGrid& grid) : n_(grid.size()) {
    if (trips.n != n_) throw InputDataError("trip matrix does not match the grid");
    trip_cdf_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            acc += trips.at(i, j);
            trip_cdf_[i * n_ + j] = acc;
        }
    }
    poi_cdf_.resize(n_);
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        acc += static_cast<double>(grid.zones[j].pois);
        poi_cdf_[j] = acc;
    }
}

int DestinationSampler::work_zone(int home_zone, double u) const {
    const std::span<const double> row(&trip_cdf_[static_cast<std::size_t>(home_zone) * n_], n_);
    if (!(row.back() > 0.0)) return home_zone;
    return pick_cdf(row, u);
}

int DestinationSampler::poi_zone(double u) const {
    if (poi_cdf_.empty() || !(poi_cdf_.back() > 0.0)) throw InputDataError("no POIs to host charging sessions");
    return pick_cdf(poi_cdf_, u);
}

double sample_soc0(KeyedRng& rng, const SocThreshold& soc) {
    if (soc.bounding == SocThreshold::Bounding::clamp) return std::clamp(normal(rng, soc.mean, soc.sd), soc.min, soc.max);
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        const double s = normal(rng, soc.mean, soc.sd);
        if (s > soc.min && s < soc.max) return s;
    }
    throw ConfigError("SoC threshold distribution has no mass inside its bounds");
}

double charging_interval(double e_daily_kwh, double battery_kwh, double soc0) {
    if (!(battery_kwh > 0.0)) throw ConfigError("battery capacity must be positive");
    if (e_daily_kwh <= 0.0) return std::numeric_limits<double>::infinity();
    const double daily_soc_drop = e_daily_kwh / (kUsableFraction * battery_kwh);
    return std::max(1.0, (1.0 - soc0) / daily_soc_drop);
}

bool decide_charging_today(double days_between_charges, KeyedRng& rng) {
    if (!std::isfinite(days_between_charges)) return false;
    return rng.uniform() * days_between_charges < 1.0;
}

std::vector<Vehicle> build_fleet(const ZoneGrid& grid, const MobilityResult& mob, const FleetSpec& spec,
                                 const SocThreshold& soc, std::uint64_t seed, Execution exec) {
    spec.validate();
    soc.validate();
    const std::size_t nz = grid.size();
    if (mob.distance_distribution.size() != nz) throw InputDataError("mobility result does not match grid");

    std::vector<std::size_t> first(nz + 1, 0);
    for (std::size_t i = 0; i < nz; ++i) first[i + 1] = first[i] + static_cast<std::size_t>(grid.zones[i].n_ev);
    const std::size_t n = first.back();

    std::vector<std::vector<double>> dist_cdf(nz);
    for (std::size_t i = 0; i < nz; ++i) {
        double acc = 0.0;
        for (const auto& dw : mob.distance_distribution[i]) dist_cdf[i].push_back(acc += dw.weight);
    }
    std::vector<double> class_cdf;
    double acc = 0.0;
    for (const auto& c : spec.classes) class_cdf.push_back(acc += c.share);

    const KeyedRng base(seed, RngPurpose::fleet);
    std::vector<Vehicle> fleet(n);
    auto make = [&](std::size_t zone, std::size_t id) {
        KeyedRng rng = base.derive(id);
        Vehicle v;
        v.id = static_cast<int>(id);
        v.home_zone = static_cast<int>(zone);
        v.class_index = pick_cdf(class_cdf, rng.uniform());
        const auto& cls = spec.classes[static_cast<std::size_t>(v.class_index)];
        v.kind = cls.kind;
        v.battery_kwh = cls.battery_kwh;
        v.max_power_kw = cls.max_power_kw;
        const double u = rng.uniform();
        double km = mob.extra_daily_km;
        if (!dist_cdf[zone].empty()) km = mob.distance_distribution[zone][static_cast<std::size_t>(pick_cdf(dist_cdf[zone], u))].two_way_km;
        v.e_daily_kwh = km * cls.consumption_kwh_per_km;
        v.soc0 = sample_soc0(rng, soc);
        v.days_between_charges = charging_interval(v.e_daily_kwh, v.battery_kwh, v.soc0);
        fleet[id] = v;
    };

    const auto nzs = static_cast<std::ptrdiff_t>(nz);
    if (exec == Execution::serial) {
        for (std::ptrdiff_t z = 0; z < nzs; ++z)
            for (std::size_t id = first[z]; id < first[z + 1]; ++id) make(static_cast<std::size_t>(z), id);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t z = 0; z < nzs; ++z)
            for (std::size_t id = first[z]; id < first[z + 1]; ++id) make(static_cast<std::size_t>(z), id);
    }
    return fleet;
}

ChargingSession sample_session(const Vehicle& v, const ChargingScenario& sc, const DestinationSampler& dest,
                               KeyedRng& rng) {
    ChargingSession s;
    s.vehicle = v.id;
    const double u = rng.uniform();
    s.location = u < sc.shares.home ? Location::home
                 : u < sc.shares.home + sc.shares.work || sc.shares.poi <= 0.0 ? Location::work
                                                                               : Location::poi;
    if (s.location == Location::work && sc.shares.work <= 0.0) s.location = Location::home;

    double arrival = 0.0;
    switch (s.location) {
        case Location::home: arrival = normal(rng, sc.arrivals.home.mean_h, sc.arrivals.home.sd_h); break;
        case Location::work: arrival = normal(rng, sc.arrivals.work.mean_h, sc.arrivals.work.sd_h); break;
        case Location::poi: {
            double w = 0.0, h = 0.0;
            for (int attempt = 0; attempt < 1000; ++attempt) {
                w = normal(rng, sc.arrivals.work.mean_h, sc.arrivals.work.sd_h);
                h = normal(rng, sc.arrivals.home.mean_h, sc.arrivals.home.sd_h);
                if (w < h) break;
            }
            if (h < w) std::swap(w, h);
            arrival = w + rng.uniform() * (h - w);
            break;
        }
    }
    s.t_arrival_h = wrap_hours(arrival);

    const auto& opts = sc.chargers.at(s.location);
    if (opts.empty()) throw ConfigError(std::string("no chargers configured at '") + to_string(s.location) + "'");
    s.power_kw = sample_power(opts, rng.uniform());
    if (sc.respect_power_caps && v.max_power_kw) s.power_kw = std::min(s.power_kw, *v.max_power_kw);

    switch (s.location) {
        case Location::home: s.zone = v.home_zone; break;
        case Location::work: s.zone = dest.work_zone(v.home_zone, rng.uniform()); break;
        case Location::poi: s.zone = dest.poi_zone(rng.uniform()); break;
    }

    s.energy_kwh = v.days_between_charges * v.e_daily_kwh;
    s.t_end_h = s.t_arrival_h + s.energy_kwh / (sc.eta * s.power_kw);
    return s;
}

std::vector<ChargingSession> simulate_day(std::span<const Vehicle> fleet, const ChargingScenario& scenario,
                                          const DestinationSampler& dest, std::uint64_t seed, std::uint64_t day,
                                          Execution exec) {
    const KeyedRng day_rng = KeyedRng(seed, RngPurpose::day).derive(day);
    std::vector<std::optional<ChargingSession>> slots(fleet.size());
    auto one = [&](std::size_t k) {
        KeyedRng rng = day_rng.derive(static_cast<std::uint64_t>(fleet[k].id));
        if (decide_charging_today(fleet[k].days_between_charges, rng))
            slots[k] = sample_session(fleet[k], scenario, dest, rng);
    };
    const auto n = static_cast<std::ptrdiff_t>(fleet.size());
    if (exec == Execution::serial) {
        for (std::ptrdiff_t k = 0; k < n; ++k) one(static_cast<std::size_t>(k));
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < n; ++k) one(static_cast<std::size_t>(k));
    }
    std::vector<ChargingSession> out;
    for (auto& s : slots)
        if (s) out.push_back(*s);
    return out;
}

LoadProfile aggregate_load(std::span<const ChargingSession> sessions, double step_h, int n_zones, Execution exec) {
    if (!(step_h > 0.0)) throw ConfigError("time step must be positive");
    const double bins_f = kDay / step_h;
    if (std::abs(bins_f - std::round(bins_f)) > 1e-9) throw ConfigError("time step must divide 24 h");
    const auto nbins = static_cast<std::size_t>(std::llround(bins_f));

    std::vector<kernels::Pulse> pulses;
    pulses.reserve(sessions.size());
    for (const auto& s : sessions) {
        if (s.zone < 0 || s.zone >= n_zones) throw InputDataError("session zone outside the grid");
        pulses.push_back({s.zone, s.power_kw, s.t_arrival_h, s.duration_h()});
    }
    LoadProfile lp;
    lp.step_h = step_h;
    lp.n_zones = n_zones;
    lp.per_zone.assign(static_cast<std::size_t>(n_zones) * nbins, 0.0);
    kernels::bin_pulses(pulses, n_zones, step_h, lp.per_zone, exec);
    lp.total = kernels::sum_zone_series(lp.per_zone, n_zones, nbins);
    return lp;
}

std::size_t peak_simultaneous(std::span<const ChargingSession> sessions, std::optional<Location> only) {
    std::vector<std::pair<double, int>> events;
    std::size_t always = 0;
    for (const auto& s : sessions) {
        if (only && s.location != *only) continue;
        const double dur = s.duration_h();
        if (dur <= 0.0) continue;
        if (dur >= kDay) {
            ++always;
            continue;
        }
        const double end = s.t_arrival_h + dur;
        if (end <= kDay) {
            events.emplace_back(s.t_arrival_h, +1);
            events.emplace_back(end, -1);
        } else {
            events.emplace_back(s.t_arrival_h, +1);
            events.emplace_back(kDay, -1);
            events.emplace_back(0.0, +1);
            events.emplace_back(end - kDay, -1);
        }
    }
    // ends sort before starts at the same instant (half-open intervals)
    std::sort(events.begin(), events.end());
    long cur = 0, best = 0;
    for (const auto& e : events) {
        cur += e.second;
        best = std::max(best, cur);
    }
    return always + static_cast<std::size_t>(best);
}

double worst_case_peak(std::span<const ChargingSession> sessions) {
    double sum = 0.0;
    for (const auto& s : sessions) sum += s.power_kw;
    return sum;
}

DayStats DayStats::from(std::span<const ChargingSession> sessions, const LoadProfile& load) {
    DayStats d;
    d.charging = sessions.size();
    for (const auto& s : sessions) ++d.sessions[index(s.location)];
    for (auto loc : kLocations)
        d.peak_simultaneous[index(loc)] = d.sessions[index(loc)] ? evplan::peak_simultaneous(sessions, loc) : 0;
    d.worst_case_kw = worst_case_peak(sessions);
    d.peak_kw = load.peak_kw();
    d.peak_time_h = static_cast<double>(load.peak_bin()) * load.step_h;
    d.energy_kwh = load.energy_kwh();
    return d;
}

double MonteCarloResult::mean_peak_kw() const {
    if (days.empty()) return 0.0;
    double s = 0.0;
    for (const auto& d : days) s += d.peak_kw;
    return s / static_cast<double>(days.size());
}

double MonteCarloResult::sd_peak_kw() const {
    double s = 0.0, sq = 0.0;
    for (const auto& d : days) {
        s += d.peak_kw;
        sq += d.peak_kw * d.peak_kw;
    }
    return sample_sd(s, sq, static_cast<int>(days.size()));
}

double MonteCarloResult::peak_of_mean_kw() const {
    return mean_total.empty() ? 0.0 : *std::max_element(mean_total.begin(), mean_total.end());
}

std::size_t MonteCarloResult::peak_of_mean_bin() const {
    return static_cast<std::size_t>(std::max_element(mean_total.begin(), mean_total.end()) - mean_total.begin());
}

MonteCarloResult monte_carlo_days(std::span<const Vehicle> fleet, const ChargingScenario& scenario,
                                  const DestinationSampler& dest, int n_zones, int n_runs, std::uint64_t seed,
                                  double step_h, bool keep_sessions) {
    if (n_runs < 1) throw ConfigError("Monte Carlo needs at least one run");
    scenario.validate();
    MonteCarloResult r;
    r.step_h = step_h;
    r.n_zones = n_zones;
    std::vector<double> sum, sum_sq;
    for (int run = 0; run < n_runs; ++run) {
        auto sessions = simulate_day(fleet, scenario, dest, seed, static_cast<std::uint64_t>(run));
        const auto load = aggregate_load(sessions, step_h, n_zones);
        if (run == 0) {
            sum.assign(load.nbins(), 0.0);
            sum_sq.assign(load.nbins(), 0.0);
            r.mean_per_zone.assign(load.per_zone.size(), 0.0);
        }
        for (std::size_t b = 0; b < load.nbins(); ++b) {
            sum[b] += load.total[b];
            sum_sq[b] += load.total[b] * load.total[b];
        }
        for (std::size_t k = 0; k < load.per_zone.size(); ++k) r.mean_per_zone[k] += load.per_zone[k];
        r.days.push_back(DayStats::from(sessions, load));
        if (keep_sessions) r.sessions.push_back(std::move(sessions));
    }
    r.mean_total.resize(sum.size());
    r.sd_total.resize(sum.size());
    for (std::size_t b = 0; b < sum.size(); ++b) {
        r.mean_total[b] = sum[b] / n_runs;
        r.sd_total[b] = sample_sd(sum[b], sum_sq[b], n_runs);
    }
    for (auto& v : r.mean_per_zone) v /= n_runs;
    return r;
}

std::int64_t round_up_to(double value, std::int64_t step) {
    return static_cast<std::int64_t>(std::ceil(value / static_cast<double>(step) - 1e-9)) * step;
}

std::vector<ChargingPointRequirement> charging_point_requirements(std::span<const DayStats> runs,
                                                                  const ChargingShares& shares,
                                                                  std::int64_t n_total) {
    if (runs.empty()) throw ConfigError("charging point requirements need at least one run");
    shares.validate();
    const std::array<double, 3> f{shares.home, shares.work, shares.poi};
    std::vector<ChargingPointRequirement> out;
    for (auto loc : kLocations) {
        if (f[index(loc)] <= 0.0) continue;
        ChargingPointRequirement req;
        req.location = loc;
        req.assigned_evs = std::round(f[index(loc)] * static_cast<double>(n_total));
        if (req.assigned_evs <= 0.0)
            throw InputDataError(std::string("no EVs assigned to '") + to_string(loc) + "' despite a non-zero share");
        double acc = 0.0;
        for (const auto& d : runs) {
            switch (loc) {
                case Location::home: acc += 1.0; break;
                case Location::work: acc += static_cast<double>(d.sessions[index(loc)]) / req.assigned_evs; break;
                case Location::poi: acc += static_cast<double>(d.peak_simultaneous[index(loc)]) / req.assigned_evs; break;
            }
        }
        req.ratio = acc / static_cast<double>(runs.size());
        req.points = static_cast<std::int64_t>(std::ceil(req.ratio * req.assigned_evs - 1e-9));
        req.reported = round_up_to(req.ratio * req.assigned_evs, 500);
        out.push_back(req);
    }
    return out;
}

std::vector<ChargingPointRequirement> charging_point_requirements(std::span<const std::vector<ChargingSession>> runs,
                                                                  const ChargingShares& shares,
                                                                  std::int64_t n_total) {
    std::vector<DayStats> stats;
    for (const auto& sessions : runs) {
        DayStats d;
        d.charging = sessions.size();
        for (const auto& s : sessions) ++d.sessions[index(s.location)];
        for (auto loc : kLocations) d.peak_simultaneous[index(loc)] = peak_simultaneous(sessions, loc);
        stats.push_back(d);
    }
    return charging_point_requirements(stats, shares, n_total);
}

std::vector<SweepPoint> peak_vs_power_sweep(std::span<const Vehicle> fleet, const DestinationSampler& dest,
                                            int n_zones, std::span<const double> power_levels_kw,
                                            double arrival_sd_h, int n_runs, std::uint64_t seed, double eta,
                                            double step_h) {
    if (n_runs < 1) throw ConfigError("sweep needs at least one run per level");
    std::vector<SweepPoint> out;
    for (double p : power_levels_kw) {
        ChargingScenario sc;
        sc.name = "single-power";
        sc.shares = ChargingShares::all_work();
        sc.arrivals.work = {9.0, arrival_sd_h};
        sc.chargers = ChargerMix::single_power(p);
        sc.eta = eta;
        sc.respect_power_caps = false;
        sc.validate();

        double ps = 0.0, psq = 0.0, ss = 0.0, ssq = 0.0;
        for (int run = 0; run < n_runs; ++run) {
            const auto sessions = simulate_day(fleet, sc, dest, KeyedRng(seed, RngPurpose::sweep).key(),
                                               static_cast<std::uint64_t>(run));
            const auto load = aggregate_load(sessions, step_h, n_zones);
            const double peak = load.peak_kw();
            const double share =
                sessions.empty() ? 0.0
                                 : static_cast<double>(peak_simultaneous(sessions)) / static_cast<double>(sessions.size());
            ps += peak;
            psq += peak * peak;
            ss += share;
            ssq += share * share;
        }
        out.push_back({p, ps / n_runs, sample_sd(ps, psq, n_runs), ss / n_runs, sample_sd(ss, ssq, n_runs)});
    }
    return out;
}

std::vector<ProbabilityPoint> charging_probability_curve(std::span<const double> e_daily_kwh, double battery_kwh,
                                                         const SocThreshold& soc, std::size_t samples,
                                                         std::uint64_t seed) {
    soc.validate();
    if (samples == 0) throw ConfigError("probability curve needs at least one sample");
    KeyedRng rng(seed, RngPurpose::curve);
    std::vector<double> thresholds(samples);
    for (auto& s : thresholds) s = sample_soc0(rng, soc);

    std::vector<ProbabilityPoint> out;
    for (double e : e_daily_kwh) {
        double sum = 0.0, sq = 0.0;
        for (double s : thresholds) {
            const double dn = charging_interval(e, battery_kwh, s);
            const double p = std::isfinite(dn) ? 1.0 / dn : 0.0;
            sum += p;
            sq += p * p;
        }
        out.push_back({e, sum / static_cast<double>(samples), sample_sd(sum, sq, static_cast<int>(samples))});
    }
    return out;
}

std::string sessions_to_csv(std::span<const ChargingSession> sessions, const std::string& date) {
    std::int64_t day = 0;
    if (!timeutil::parse_date(date, day)) throw ConfigError("bad reference date '" + date + "'");
    std::ostringstream os;
    os << "vehicle,location,zone,power_kw,start,end,energy_kwh\n";
    for (const auto& s : sessions) {
        const auto start_s = static_cast<std::int64_t>(std::llround(s.t_arrival_h * 3600.0));
        const auto end_s = static_cast<std::int64_t>(std::llround(s.t_end_h * 3600.0));
        os << s.vehicle << ',' << to_string(s.location) << ',' << s.zone << ',' << csv::fixed(s.power_kw, 1) << ','
           << timeutil::format_datetime(day, start_s) << ',' << timeutil::format_datetime(day, end_s) << ','
           << csv::fixed(s.energy_kwh, 3) << '\n';
    }
    return os.str();
}

std::string load_profile_to_csv(std::span<const double> per_zone, std::span<const double> total, int n_zones,
                                double step_h, std::span<const double> sd_total) {
    const std::size_t nbins = total.size();
    std::ostringstream os;
    os << "time";
    for (int z = 0; z < n_zones; ++z) os << ",zone_" << z << "_kw";
    os << ",total_kw";
    if (!sd_total.empty()) os << ",total_sd_kw";
    os << '\n';
    for (std::size_t b = 0; b < nbins; ++b) {
        const auto sec = static_cast<int>(std::llround(static_cast<double>(b) * step_h * 3600.0));
        char t[16];
        std::snprintf(t, sizeof t, "%02d:%02d:%02d", sec / 3600, sec / 60 % 60, sec % 60);
        os << t;
        for (int z = 0; z < n_zones; ++z) os << ',' << csv::fixed(per_zone[static_cast<std::size_t>(z) * nbins + b], 3);
        os << ',' << csv::fixed(total[b], 3);
        if (!sd_total.empty()) os << ',' << csv::fixed(sd_total[b], 3);
        os << '\n';
    }
    return os.str();
}

}  // namespace evplan
