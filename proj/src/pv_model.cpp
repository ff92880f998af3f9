#include "evplan/pv_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "evplan/csv.hpp"
#include "evplan/errors.hpp"
#include "evplan/solar.hpp"
#include "evplan/timeutil.hpp"

namespace evplan {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

void WeatherSeries::validate() const {
    if (records.empty()) throw InputDataError("weather series is empty");
    if (!(std::isfinite(lat) && std::abs(lat) <= 90.0 && std::isfinite(lon) && std::abs(lon) <= 180.0))
        throw InputDataError("weather site coordinates are invalid");
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        for (double v : {r.t, r.ghi, r.dni, r.dhi, r.t_amb, r.wind})
            if (!std::isfinite(v)) throw InputDataError("weather record " + std::to_string(k) + " has a non-finite value");
        if (r.ghi < 0.0 || r.dni < 0.0 || r.dhi < 0.0)
            throw InputDataError("weather record " + std::to_string(k) + " has negative irradiance");
        if (r.wind < 0.0) throw InputDataError("weather record " + std::to_string(k) + " has negative wind speed");
        if (k > 0 && !(r.t > records[k - 1].t))
            throw InputDataError("weather timestamps are not strictly increasing at record " + std::to_string(k));
    }
}

double WeatherSeries::step_h() const {
    if (records.size() < 2) return 1.0;
    std::vector<double> d;
    d.reserve(records.size() - 1);
    for (std::size_t k = 1; k < records.size(); ++k) d.push_back(records[k].t - records[k - 1].t);
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    return d[d.size() / 2] / 3600.0;
}

std::size_t WeatherSeries::closure_mismatches() const {
    std::size_t bad = 0;
    for (const auto& r : records) {
        const auto sp = solar_position(r.t, lat, lon);
        if (sp.zenith_deg >= 90.0 || r.ghi < 20.0) continue;
        const double est = r.dhi + r.dni * std::cos(sp.zenith_deg * kDeg);
        if (std::abs(est - r.ghi) > 0.05 * r.ghi) ++bad;
    }
    return bad;
}

void PVSystemSpec::validate() const {
    if (!(eta_pv > 0.0 && eta_pv < 1.0)) throw ConfigError("module efficiency must lie in (0,1)");
    if (!(losses >= 0.0 && losses < 1.0)) throw ConfigError("system losses must lie in [0,1)");
    if (!(tilt_deg >= 0.0 && tilt_deg <= 90.0)) throw ConfigError("tilt must lie in [0,90] degrees");
    if (!std::isfinite(azimuth_deg)) throw ConfigError("azimuth must be finite");
    if (!(a_r > 0.0)) throw ConfigError("angular loss parameter a_r must be > 0");
    if (!(albedo >= 0.0 && albedo <= 1.0)) throw ConfigError("albedo must lie in [0,1]");
    if (!(u_c > 0.0 && u_v >= 0.0)) throw ConfigError("heat loss coefficients must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("absorption must lie in (0,1]");
    if (!std::isfinite(beta_t)) throw ConfigError("temperature coefficient must be finite");
}

PoaComponents poa_components(double ghi, double dni, double dhi, double zenith, double sun_az, double tilt,
                             double surface_az, double albedo) {
    PoaComponents c;
    c.aoi_deg = angle_of_incidence_deg(zenith, sun_az, tilt, surface_az);
    if (zenith < 90.0) c.beam = std::max(0.0, dni * std::cos(c.aoi_deg * kDeg));
    const double ct = std::cos(tilt * kDeg);
    c.sky = dhi * (1.0 + ct) / 2.0;
    c.ground = ghi * albedo * (1.0 - ct) / 2.0;
    return c;
}

std::vector<double> poa_irradiance(const WeatherSeries& w, double tilt, double azimuth, double albedo) {
    std::vector<double> out(w.records.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto& r = w.records[k];
        const auto sp = solar_position(r.t, w.lat, w.lon);
        out[k] = poa_components(r.ghi, r.dni, r.dhi, sp.zenith_deg, sp.azimuth_deg, tilt, azimuth, albedo).total();
    }
    return out;
}

double cell_temperature(double g_poa, double t_amb, double wind, const PVSystemSpec& s) {
    return t_amb + g_poa * s.alpha * (1.0 - s.eta_pv) / (s.u_c + s.u_v * wind);
}

double angular_loss(double aoi_deg, double a_r) {
    if (aoi_deg >= 90.0) return 0.0;
    const double c = std::cos(std::max(aoi_deg, 0.0) * kDeg);
    return (1.0 - std::exp(-c / a_r)) / (1.0 - std::exp(-1.0 / a_r));
}

DiffuseIam diffuse_angular_loss(double tilt_deg, double a_r) {
    // Martin-Ruiz closed-form factors for isotropic sky and ground diffuse.
    constexpr double c1 = 4.0 / (3.0 * std::numbers::pi);
    const double c2 = 0.5 * a_r - 0.154;
    const double b = std::max(tilt_deg, 1e-6) * kDeg;
    const double sb = std::sin(b), cb = std::cos(b);
    auto iam = [&](double t) { return 1.0 - std::exp(-(c1 + c2 * t) * t / a_r); };
    const double t_sky = sb + (std::numbers::pi - b - sb) / (1.0 + cb);
    const double t_gnd = sb + (b - sb) / (1.0 - cb);
    return {iam(t_sky), iam(t_gnd)};
}

double pv_power(double g_poa, double t_cell, const PVSystemSpec& s) {
    const double p = g_poa / 1000.0 * (1.0 + s.beta_t * (t_cell - 25.0)) * (1.0 - s.losses);
    return p > 0.0 ? p : 0.0;
}

double PVProfile::annual_yield_kwh_per_kwp() const {
    return std::accumulate(kw_per_kwp.begin(), kw_per_kwp.end(), 0.0) * step_h;
}

SunTrack sun_track(const WeatherSeries& w, Execution exec) {
    const auto n = static_cast<std::ptrdiff_t>(w.records.size());
    SunTrack s;
    s.zenith_deg.resize(w.records.size());
    s.azimuth_deg.resize(w.records.size());
    auto one = [&](std::ptrdiff_t k) {
        const auto sp = solar_position(w.records[static_cast<std::size_t>(k)].t, w.lat, w.lon);
        s.zenith_deg[static_cast<std::size_t>(k)] = sp.zenith_deg;
        s.azimuth_deg[static_cast<std::size_t>(k)] = sp.azimuth_deg;
    };
    if (exec == Execution::serial) {
        for (std::ptrdiff_t k = 0; k < n; ++k) one(k);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < n; ++k) one(k);
    }
    return s;
}

namespace {

double step_power(const WeatherRecord& r, double zen, double az, const PVSystemSpec& s, const DiffuseIam& diam) {
    const auto c = poa_components(r.ghi, r.dni, r.dhi, zen, az, s.tilt_deg, s.azimuth_deg, s.albedo);
    const double g_poa = c.total();
    double g_eff = g_poa;
    if (s.angular_losses) g_eff = c.beam * angular_loss(c.aoi_deg, s.a_r) + c.sky * diam.sky + c.ground * diam.ground;
    // cell heating follows the raw plane-of-array irradiance
    return pv_power(g_eff, cell_temperature(g_poa, r.t_amb, r.wind, s), s);
}

}  // namespace

PVProfile simulate_pv(const WeatherSeries& w, const SunTrack& sun, const PVSystemSpec& spec, Execution exec) {
    spec.validate();
    if (sun.zenith_deg.size() != w.records.size()) throw InputDataError("sun track does not match weather series");
    PVProfile p;
    p.step_h = w.step_h();
    p.utc_offset_h = w.utc_offset_h;
    p.t.resize(w.records.size());
    p.kw_per_kwp.resize(w.records.size());
    const DiffuseIam diam = diffuse_angular_loss(spec.tilt_deg, spec.a_r);
    const auto n = static_cast<std::ptrdiff_t>(w.records.size());
    auto one = [&](std::ptrdiff_t kk) {
        const auto k = static_cast<std::size_t>(kk);
        p.t[k] = w.records[k].t;
        p.kw_per_kwp[k] = step_power(w.records[k], sun.zenith_deg[k], sun.azimuth_deg[k], spec, diam);
    };
    if (exec == Execution::serial) {
        for (std::ptrdiff_t k = 0; k < n; ++k) one(k);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < n; ++k) one(k);
    }
    return p;
}

PVProfile simulate_pv(const WeatherSeries& w, const PVSystemSpec& spec, Execution exec) {
    w.validate();
    return simulate_pv(w, sun_track(w, exec), spec, exec);
}

Orientation optimal_orientation(const WeatherSeries& w, const PVSystemSpec& spec, Execution exec) {
    w.validate();
    spec.validate();
    const double span_h = (w.records.back().t - w.records.front().t) / 3600.0 + w.step_h();
    if (span_h < 365.0 * 24.0 - 1e-6) throw InputDataError("orientation search needs at least one year of weather");

    const SunTrack sun = sun_track(w, exec);
    const double facing = w.lat >= 0.0 ? 180.0 : 0.0;
    std::vector<Orientation> cand;
    for (int tilt = 0; tilt <= 45; ++tilt)
        for (int daz = -90; daz <= 90; daz += 5) {
            cand.push_back({static_cast<double>(tilt), std::fmod(facing + daz + 360.0, 360.0), 0.0});
            if (tilt == 0) break;  // azimuth is irrelevant when flat
        }

    const double step = w.step_h();
    const auto nc = static_cast<std::ptrdiff_t>(cand.size());
    auto eval = [&](std::ptrdiff_t i) {
        PVSystemSpec s = spec;
        s.tilt_deg = cand[static_cast<std::size_t>(i)].tilt_deg;
        s.azimuth_deg = cand[static_cast<std::size_t>(i)].azimuth_deg;
        const DiffuseIam diam = diffuse_angular_loss(s.tilt_deg, s.a_r);
        double sum = 0.0;
        for (std::size_t k = 0; k < w.records.size(); ++k)
            sum += step_power(w.records[k], sun.zenith_deg[k], sun.azimuth_deg[k], s, diam);
        cand[static_cast<std::size_t>(i)].yield_kwh_per_kwp = sum * step;
    };
    if (exec == Execution::serial) {
        for (std::ptrdiff_t i = 0; i < nc; ++i) eval(i);
    } else {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < nc; ++i) eval(i);
    }
    return *std::max_element(cand.begin(), cand.end(), [](const Orientation& a, const Orientation& b) {
        return a.yield_kwh_per_kwp < b.yield_kwh_per_kwp;
    });
}

std::string pv_profile_to_csv(const PVProfile& p) {
    std::ostringstream os;
    os << "time,kW_per_kWp\n";
    for (std::size_t k = 0; k < p.t.size(); ++k) {
        const auto sec = static_cast<std::int64_t>(std::llround(p.t[k]));
        const std::int64_t day = sec >= 0 ? sec / 86400 : (sec - 86399) / 86400;
        os << timeutil::format_datetime(day, sec - day * 86400) << "Z," << csv::fixed(p.kw_per_kwp[k], 5) << '\n';
    }
    return os.str();
}

}  // namespace evplan
