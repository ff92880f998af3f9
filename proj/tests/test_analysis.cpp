#include <doctest.h>

#include <cmath>

#include "evplan/analysis.hpp"
#include "evplan/errors.hpp"
#include "evplan/timeutil.hpp"
#include "helpers.hpp"

using namespace evplan;

namespace {

/// 10 kW from 08:00 to 16:00 and a PV triangle 0 -> 12 kW (13:00) -> 0 over 06:00-18:00,
/// sampled at bin centres on a fine grid.
void triangle_case(double step_h, std::vector<double>& pv, std::vector<double>& ev) {
    const auto n = static_cast<std::size_t>(std::llround(24.0 / step_h));
    pv.assign(n, 0.0);
    ev.assign(n, 0.0);
    for (std::size_t b = 0; b < n; ++b) {
        const double t = (static_cast<double>(b) + 0.5) * step_h;
        ev[b] = t >= 8.0 && t < 16.0 ? 10.0 : 0.0;
        if (t > 6.0 && t <= 13.0) pv[b] = 12.0 * (t - 6.0) / 7.0;
        if (t > 13.0 && t < 18.0) pv[b] = 12.0 * (18.0 - t) / 5.0;
    }
}

}  // namespace

TEST_CASE("self-sufficiency limit cases") {
    const std::vector<double> ev{1, 2, 3, 0};
    const std::vector<double> big{5, 5, 5, 5};
    const std::vector<double> zero{0, 0, 0, 0};
    CHECK(*self_sufficiency(big, ev) == 1.0);
    CHECK(*self_sufficiency(zero, ev) == 0.0);
    CHECK(*self_sufficiency(ev, ev) == 1.0);
    CHECK(*self_consumption(ev, ev) == 1.0);
    CHECK_FALSE(self_sufficiency(big, zero).has_value());
    CHECK_FALSE(self_consumption(zero, ev).has_value());
    CHECK(*energy_coverage(big, ev) == doctest::Approx(20.0 / 6.0));
    const std::vector<double> shorter{1, 2};
    CHECK_THROWS_AS(self_sufficiency(shorter, ev), InputDataError);
}

TEST_CASE("triangular overlap oracle") {
    // piecewise: the two series cross at 11:50 and 13:50
    const double a = (24.0 / 7.0 + 10.0) / 2.0 * (70.0 / 12.0 - 2.0);
    const double b = 10.0 * 2.0;
    const double c = (10.0 + 4.8) / 2.0 * (16.0 - (13.0 + 5.0 / 6.0));
    const double oracle = (a + b + c) / 80.0;
    CHECK(oracle == doctest::Approx(0.77214).epsilon(1e-5));
    std::vector<double> pv, ev;
    triangle_case(1.0 / 600.0, pv, ev);
    CHECK(*self_sufficiency(pv, ev) == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("SS times EV energy equals SC times PV energy, SS monotone in capacity") {
    std::vector<double> pv, ev;
    triangle_case(0.25, pv, ev);
    double prev = -1.0;
    for (double k : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        std::vector<double> p(pv);
        for (double& x : p) x *= k;
        const double ss = *self_sufficiency(p, ev);
        CHECK(ss >= prev);
        CHECK(ss >= 0.0);
        CHECK(ss <= 1.0);
        prev = ss;
        if (k > 0.0) {
            double se = 0.0, sp = 0.0;
            for (double x : ev) se += x;
            for (double x : p) sp += x;
            CHECK(ss * se == doctest::Approx(*self_consumption(p, ev) * sp).epsilon(1e-12));
        }
    }
}

TEST_CASE("PV day series interpolates to bin centres in local time") {
    PVProfile p;
    p.utc_offset_h = 3.0;
    p.step_h = 1.0;
    const std::int64_t day = timeutil::days_from_civil(2020, 1, 6);
    const double t0 = static_cast<double>(day) * 86400.0 - 3 * 3600.0;  // local midnight
    for (int h = 0; h < 24; ++h) {
        p.t.push_back(t0 + h * 3600.0);
        p.kw_per_kwp.push_back(h);
    }
    const auto s = pv_day_series(p, day, 0.25);
    REQUIRE(s.size() == 96);
    CHECK(s[0] == doctest::Approx(0.125));
    CHECK(s[40] == doctest::Approx(10.125));
    CHECK(s[95] == 0.0);  // past the last sample
}

TEST_CASE("weekdays and quantiles") {
    CHECK(weekdays(2020).size() == 262);
    const std::vector<std::int64_t> hol{timeutil::days_from_civil(2020, 1, 7), timeutil::days_from_civil(2020, 1, 11)};
    CHECK(weekdays(2020, hol).size() == 261);
    const std::vector<double> v{1, 2, 3, 4};
    CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
    CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
    const auto b = box_stats({1, 2, 3, 4, 5, 6, 7, 8, 100});
    CHECK(b.median == 5.0);
    CHECK(b.q1 == 3.0);
    CHECK(b.q3 == 7.0);
    CHECK(b.whisker_high == 8.0);
    REQUIRE(b.outliers.size() == 1);
    CHECK(b.outliers[0] == 100.0);
}

TEST_CASE("capacity sweep") {
    PVProfile p;
    p.step_h = 1.0;
    const auto days = weekdays(2020);
    const double t0 = static_cast<double>(timeutil::days_from_civil(2020, 1, 1)) * 86400.0;
    for (int h = 0; h < 366 * 24; ++h) {
        const double hod = h % 24 + 0.5;
        p.t.push_back(t0 + h * 3600.0);
        p.kw_per_kwp.push_back(hod > 6 && hod < 18 ? std::sin((hod - 6) / 12 * kPi) : 0.0);
    }
    const DailyLoadFn load = [](std::int64_t, std::size_t) {
        std::vector<double> ev(96, 0.0);
        for (std::size_t b = 32; b < 64; ++b) ev[b] = 100.0;
        return ev;
    };
    const std::vector<double> caps{0.5, 1.0, 2.0};
    const auto r = capacity_sweep(p, load, caps, 100.0, days, 0.25);
    REQUIRE(r.size() == 3);
    CHECK(r[0].ss_box.n == 262);
    CHECK(r[0].ss_box.mean < r[1].ss_box.mean);
    CHECK(r[1].ss_box.mean < r[2].ss_box.mean);
    std::size_t n = 0;
    for (const auto& m : r[0].monthly) n += m.n;
    CHECK(n == 262);
}

TEST_CASE("fleet dynamics") {
    CHECK(fleet_share(0.0, {0.05, 1.0, 0.1}) == doctest::Approx(0.1));
    CHECK(time_to_share(1.0 / 6.0, {0.05, 1.0, 0.0}) == doctest::Approx(3.646).epsilon(1e-3));
    CHECK(time_to_share(1.0 / 6.0, {0.05, 0.5, 0.0}) == doctest::Approx(8.109).epsilon(1e-3));
    CHECK(time_to_share(1.0 / 6.0, {0.05, 0.2, 0.0}) == doctest::Approx(35.835).epsilon(1e-3));
    for (double t : {1.0, 5.0, 30.0}) {
        const FleetDynamics d{0.05, 0.5, 0.0};
        CHECK(time_to_share(fleet_share(t, d), d) == doctest::Approx(t).epsilon(1e-10));
    }
    CHECK_THROWS_AS(time_to_share(0.3, {0.05, 0.2, 0.0}), ConfigError);
}

TEST_CASE("reference load scaling and uptake") {
    std::vector<double> national(24, 3000.0);
    national[19] = 4560.0;
    const auto ref = scale_reference_load(national, 0.28731);
    CHECK(ref.peak_mw() == doctest::Approx(1310.1).epsilon(1e-4));
    const auto same = scale_reference_load(national, 1.0);
    CHECK(same.city_mw == national);
    const auto derived = scale_reference_load(national, 5.54e6, 8.88e6, 2100.0);
    CHECK(derived.share == doctest::Approx(2100.0 / 4560.0 * 5.54 / 8.88));
    CHECK(ev_uptake_percent(353.0, 23198.0) == doctest::Approx(1.5217).epsilon(1e-4));
    CHECK(ev_uptake_percent(0.0, 23198.0) == 0.0);
    CHECK(ev_uptake_percent(706.0, 23198.0) == doctest::Approx(2.0 * ev_uptake_percent(353.0, 23198.0)));
}
