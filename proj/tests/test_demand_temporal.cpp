#include <doctest.h>

#include <cmath>
#include <numeric>

#include "evplan/demand_temporal.hpp"
#include "evplan/errors.hpp"
#include "evplan/kernels.hpp"
#include "evplan/rng.hpp"
#include "helpers.hpp"

using namespace evplan;

namespace {

Vehicle vehicle(double e_daily, double dn, std::optional<double> cap = std::nullopt) {
    Vehicle v;
    v.e_daily_kwh = e_daily;
    v.days_between_charges = dn;
    v.max_power_kw = cap;
    v.battery_kwh = 60.0;
    return v;
}

ChargingScenario only(Location loc, ChargerMix mix) {
    ChargingScenario sc;
    sc.shares = {loc == Location::home ? 1.0 : 0.0, loc == Location::work ? 1.0 : 0.0, loc == Location::poi ? 1.0 : 0.0};
    sc.chargers = std::move(mix);
    return sc;
}

ChargingSession session(double start, double end, double kw, int zone = 0) {
    ChargingSession s;
    s.t_arrival_h = start;
    s.t_end_h = end;
    s.power_kw = kw;
    s.zone = zone;
    return s;
}

}  // namespace

TEST_CASE("charging interval examples") {
    CHECK(charging_interval(3.184, 60.0, 0.6) == doctest::Approx(6.03).epsilon(1e-3));
    CHECK(1.0 / charging_interval(3.184, 60.0, 0.6) == doctest::Approx(0.166).epsilon(3e-3));
    CHECK(charging_interval(3.184, 15.0, 0.6) == doctest::Approx(1.508).epsilon(1e-3));
    CHECK(charging_interval(50.0, 60.0, 0.6) == 1.0);
    CHECK(std::isinf(charging_interval(0.0, 60.0, 0.6)));
}

TEST_CASE("daily charging decision frequency") {
    KeyedRng rng(5, RngPurpose::day);
    int hits = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) hits += decide_charging_today(4.0, rng);
    CHECK(static_cast<double>(hits) / n == doctest::Approx(0.25).epsilon(0.04));
    for (int k = 0; k < 1000; ++k) CHECK(decide_charging_today(1.0, rng));
    CHECK_FALSE(decide_charging_today(INFINITY, rng));
}

TEST_CASE("threshold SoC draws") {
    // clamping keeps the mean near 0.6; truncation on (0.05, 0.95) pulls it
    // down to the analytic truncated-normal mean of about 0.5839
    const std::pair<SocThreshold, double> cases[] = {{SocThreshold{}, 0.6}, {SocThreshold::truncated(), 0.5839}};
    for (const auto& [soc, expect] : cases) {
        KeyedRng rng(9);
        double s = 0.0;
        for (int k = 0; k < 50000; ++k) {
            const double v = sample_soc0(rng, soc);
            CHECK_MESSAGE((v >= soc.min && v <= soc.max), v);
            s += v;
        }
        CHECK(std::abs(s / 50000 - expect) < 0.005);
    }
    KeyedRng a(3), b(3);
    for (int k = 0; k < 100; ++k) CHECK(sample_soc0(a) == sample_soc0(b));
    SocThreshold bad;
    bad.sd = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("keyed streams are independent of consumption order") {
    KeyedRng base(42, RngPurpose::fleet);
    auto x = base.derive(7);
    auto y = base.derive(8);
    const auto x1 = x(), y1 = y();
    auto y2 = base.derive(8);
    auto x2 = base.derive(7);
    CHECK(y2() == y1);
    CHECK(x2() == x1);
    CHECK(x1 != y1);
}

TEST_CASE("session duration and caps") {
    DestinationSampler dest;
    KeyedRng rng(1);
    const auto s = sample_session(vehicle(13.32, 1.0), only(Location::home, ChargerMix::single_power(7.4)), dest, rng);
    CHECK(s.location == Location::home);
    CHECK(s.duration_h() == doctest::Approx(2.0));
    CHECK(s.energy_kwh == doctest::Approx(13.32));
    CHECK(s.grid_energy_kwh() == doctest::Approx(13.32 / 0.9));

    const auto w = testutil::small_world(500);
    const DestinationSampler d(w.trips, w.grid);
    ChargerMix fast;
    fast.at(Location::poi) = {{22.0, 1.0}};
    const auto p = sample_session(vehicle(5.0, 1.0, 11.0), only(Location::poi, fast), d, rng);
    CHECK(p.location == Location::poi);
    CHECK(p.power_kw == 11.0);
    CHECK(w.grid.zones[static_cast<std::size_t>(p.zone)].pois > 0);

    ChargingScenario empty = only(Location::work, ChargerMix{});
    CHECK_THROWS_AS(sample_session(vehicle(5.0, 1.0), empty, d, rng), ConfigError);
}

TEST_CASE("mean home charger power") {
    CHECK(ChargerMix::addis_default().mean_power(Location::home) == doctest::Approx(6.05));
    DestinationSampler dest;
    KeyedRng rng(2);
    const auto sc = only(Location::home, ChargerMix::addis_default());
    double s = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) s += sample_session(vehicle(5.0, 1.0), sc, dest, rng).power_kw;
    CHECK(s / n == doctest::Approx(6.05).epsilon(0.01));
}

TEST_CASE("aggregation examples") {
    const std::vector<ChargingSession> one{session(18.0, 20.0, 7.4)};
    const auto l = aggregate_load(one, 0.25, 1);
    REQUIRE(l.nbins() == 96);
    for (std::size_t b = 0; b < 96; ++b) CHECK(l.total[b] == doctest::Approx(b >= 72 && b < 80 ? 7.4 : 0.0));

    const std::vector<ChargingSession> wrap{session(23.5, 24.5, 4.0)};
    const auto lw = aggregate_load(wrap, 0.25, 1);
    CHECK(lw.total[0] == doctest::Approx(4.0));
    CHECK(lw.total[1] == doctest::Approx(4.0));
    CHECK(lw.total[2] == 0.0);
    CHECK(lw.total[94] == doctest::Approx(4.0));
    CHECK(lw.total[95] == doctest::Approx(4.0));
    CHECK(lw.energy_kwh() == doctest::Approx(4.0));

    // longer than a day wraps onto itself
    const std::vector<ChargingSession> long_one{session(10.0, 40.0, 1.0)};
    CHECK(aggregate_load(long_one, 0.25, 1).energy_kwh() == doctest::Approx(30.0));
}

TEST_CASE("energy closure and serial/parallel identity") {
    KeyedRng rng(77);
    std::vector<ChargingSession> s;
    double energy = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const double start = 24.0 * rng.uniform();
        const double dur = 0.1 + 9.0 * rng.uniform();
        s.push_back(session(start, start + dur, 3.0 + 20.0 * rng.uniform(), k % 7));
        energy += s.back().grid_energy_kwh();
    }
    std::stable_sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.zone < b.zone; });
    const auto ser = aggregate_load(s, 0.25, 7, Execution::serial);
    const auto par = aggregate_load(s, 0.25, 7, Execution::parallel);
    CHECK(testutil::rel(ser.energy_kwh(), energy) < 1e-6);
    CHECK(ser.per_zone == par.per_zone);
    CHECK(ser.total == par.total);
}

TEST_CASE("peak simultaneity and worst case") {
    const std::vector<ChargingSession> s{session(23.0, 25.0, 11.0), session(0.5, 2.0, 7.4), session(3.0, 4.0, 3.2)};
    CHECK(peak_simultaneous(s) == 2);
    CHECK(worst_case_peak(s) == doctest::Approx(21.6));
    const std::vector<ChargingSession> single{session(8.0, 9.0, 11.0)};
    CHECK(worst_case_peak(single) == 11.0);
    CHECK(peak_simultaneous(single, Location::poi) == 0);
}

TEST_CASE("fleet and day simulation are deterministic and thread independent") {
    const auto w = testutil::small_world(3000);
    const auto fleet_s = build_fleet(w.grid, w.mob, FleetSpec::addis_default(), {}, 42, Execution::serial);
    const auto fleet_p = build_fleet(w.grid, w.mob, FleetSpec::addis_default(), {}, 42, Execution::parallel);
    REQUIRE(fleet_s.size() == 3000);
    for (std::size_t k = 0; k < fleet_s.size(); ++k) {
        CHECK(fleet_s[k].soc0 == fleet_p[k].soc0);
        CHECK(fleet_s[k].e_daily_kwh == fleet_p[k].e_daily_kwh);
    }
    std::size_t phev = 0;
    for (const auto& v : fleet_s) phev += v.kind == VehicleKind::phev;
    CHECK(static_cast<double>(phev) / 3000 == doctest::Approx(0.2).epsilon(0.15));

    const DestinationSampler dest(w.trips, w.grid);
    ChargingScenario sc;
    sc.shares = ChargingShares::mixed();
    const auto a = simulate_day(fleet_s, sc, dest, 42, 3, Execution::serial);
    const auto b = simulate_day(fleet_s, sc, dest, 42, 3, Execution::parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].vehicle == b[k].vehicle);
        CHECK(a[k].t_arrival_h == b[k].t_arrival_h);
        CHECK(a[k].power_kw == b[k].power_kw);
        CHECK(a[k].zone == b[k].zone);
    }
    const auto c = simulate_day(fleet_s, sc, dest, 42, 4, Execution::parallel);
    CHECK(c.size() != a.size());

    const auto m1 = monte_carlo_days(fleet_s, sc, dest, static_cast<int>(w.grid.size()), 1, 42);
    for (double v : m1.sd_total) CHECK(v == 0.0);
    const auto m2 = monte_carlo_days(fleet_s, sc, dest, static_cast<int>(w.grid.size()), 3, 42);
    const auto m3 = monte_carlo_days(fleet_s, sc, dest, static_cast<int>(w.grid.size()), 3, 42);
    CHECK(m2.mean_total == m3.mean_total);
    CHECK(m2.sd_total == m3.sd_total);
}

TEST_CASE("charging point requirements") {
    DayStats d;
    d.sessions = {0, 340, 0};
    d.peak_simultaneous = {0, 0, 30};
    const std::vector<DayStats> runs{d, d};
    const auto home = charging_point_requirements(runs, ChargingShares::all_home(), 100000);
    REQUIRE(home.size() == 1);
    CHECK(home[0].points == 100000);
    CHECK(home[0].reported == 100000);
    const auto work = charging_point_requirements(runs, ChargingShares::all_work(), 1000);
    CHECK(work[0].ratio == doctest::Approx(0.34));
    CHECK(work[0].points == 340);
    CHECK(work[0].reported == 500);
    const auto mixed = charging_point_requirements(runs, ChargingShares::mixed(), 1000);
    REQUIRE(mixed.size() == 3);
    CHECK(mixed[2].ratio == doctest::Approx(30.0 / 500.0));
    CHECK(round_up_to(31234, 500) == 31500);
    CHECK(round_up_to(32000, 500) == 32000);
    CHECK_THROWS_AS(charging_point_requirements(runs, ChargingShares::all_work(), 0), InputDataError);
}

TEST_CASE("low-power sweep saturates simultaneity") {
    const auto w = testutil::small_world(1000);
    const auto fleet = build_fleet(w.grid, w.mob, FleetSpec::addis_default(), {}, 1);
    const DestinationSampler dest(w.trips, w.grid);
    const std::vector<double> levels{0.05, 50.0};
    const auto sw = peak_vs_power_sweep(fleet, dest, static_cast<int>(w.grid.size()), levels, 1.8, 2, 1);
    REQUIRE(sw.size() == 2);
    CHECK(sw[0].simultaneous_share_mean == doctest::Approx(1.0));
    CHECK(sw[1].simultaneous_share_mean < sw[0].simultaneous_share_mean);
}

TEST_CASE("probability curve and CSV exports") {
    const std::vector<double> e{1.0, 100.0};
    const auto c = charging_probability_curve(e, 60.0, {}, 20000, 4);
    CHECK(c[1].mean == doctest::Approx(1.0));
    CHECK(c[0].mean < c[1].mean);
    const std::vector<ChargingSession> s{session(23.0, 25.0, 11.0)};
    const auto csv = sessions_to_csv(s, "2020-01-06");
    CHECK(csv.find("2020-01-06T23:00:00") != std::string::npos);
    CHECK(csv.find("2020-01-07T01:00:00") != std::string::npos);
    const auto l = aggregate_load(s, 0.25, 1);
    const auto lp = load_profile_to_csv(l.per_zone, l.total, 1, 0.25);
    CHECK(lp.rfind("time,zone_0_kw,total_kw\n", 0) == 0);
}
