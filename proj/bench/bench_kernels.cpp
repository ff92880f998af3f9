// Serial reference vs OpenMP path for the hot loops, on the sample case.
#include <benchmark/benchmark.h>

#include "evplan/demand_temporal.hpp"
#include "evplan/kernels.hpp"
#include "evplan/mobility.hpp"
#include "evplan/pipeline.hpp"
#include "evplan/pv_model.hpp"
#include "evplan/rng.hpp"
#include "evplan/weather_io.hpp"

using namespace evplan;

namespace {

struct Sample {
    ScenarioConfig cfg;
    ZoneGrid grid;
    DistanceMatrix dist;
    TripMatrix trips;
    MobilityResult mob;
    std::vector<Vehicle> fleet;
    DestinationSampler dest;
    WeatherSeries weather;
    std::vector<LonLat> points;

    Sample() {
        grid = build_grid(cfg);
        dist = distance_matrix(grid, nullptr, {cfg.mobility.circuity_factor, 0, 0.0});
        trips = trip_probabilities(grid, dist, compute_beta(grid.cell_area_km2()));
        mob = vkm(grid, trips, dist);
        fleet = build_fleet(grid, mob, cfg.fleet, cfg.charging.soc, cfg.seed);
        dest = DestinationSampler(trips, grid);
        weather = read_weather_csv(cfg.inputs.weather, cfg.pv.latitude, cfg.pv.longitude, cfg.pv.utc_offset_h);
        KeyedRng rng(1);
        const auto bb = read_boundary_geojson(cfg.inputs.boundary).bounds();
        for (int k = 0; k < 200000; ++k)
            points.push_back({bb.min_lon + rng.uniform() * (bb.max_lon - bb.min_lon),
                              bb.min_lat + rng.uniform() * (bb.max_lat - bb.min_lat)});
    }
};

const Sample& sample() {
    static const Sample s;
    return s;
}

Execution exec_of(const benchmark::State& st) { return st.range(0) ? Execution::parallel : Execution::serial; }

void BM_locate_points(benchmark::State& st) {
    const auto& s = sample();
    for (auto _ : st) benchmark::DoNotOptimize(kernels::locate_points(s.grid, s.points, exec_of(st)));
}

void BM_gravity_rows(benchmark::State& st) {
    const auto& s = sample();
    std::vector<double> a;
    for (const auto& z : s.grid.zones) a.push_back(static_cast<double>(z.workplaces));
    std::vector<double> out(s.dist.km.size());
    for (auto _ : st) {
        kernels::gravity_rows(a, s.dist.km, 0.236, out, exec_of(st));
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_build_fleet(benchmark::State& st) {
    const auto& s = sample();
    for (auto _ : st)
        benchmark::DoNotOptimize(build_fleet(s.grid, s.mob, s.cfg.fleet, s.cfg.charging.soc, 7, exec_of(st)));
}

void BM_simulate_day(benchmark::State& st) {
    const auto& s = sample();
    const auto sc = s.cfg.scenario("mixed");
    std::uint64_t day = 0;
    for (auto _ : st) benchmark::DoNotOptimize(simulate_day(s.fleet, sc, s.dest, 1, day++, exec_of(st)));
}

void BM_aggregate_load(benchmark::State& st) {
    const auto& s = sample();
    const auto sessions = simulate_day(s.fleet, s.cfg.scenario("mixed"), s.dest, 1, 0);
    const int nz = static_cast<int>(s.grid.size());
    for (auto _ : st) benchmark::DoNotOptimize(aggregate_load(sessions, 0.25, nz, exec_of(st)));
}

void BM_sun_track(benchmark::State& st) {
    const auto& s = sample();
    for (auto _ : st) benchmark::DoNotOptimize(sun_track(s.weather, exec_of(st)));
}

void BM_simulate_pv(benchmark::State& st) {
    const auto& s = sample();
    const SunTrack sun = sun_track(s.weather);
    for (auto _ : st) benchmark::DoNotOptimize(simulate_pv(s.weather, sun, s.cfg.pv.system, exec_of(st)));
}

}  // namespace

// Arg 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_locate_points)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_gravity_rows)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_build_fleet)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_simulate_day)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_aggregate_load)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sun_track)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_simulate_pv)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
