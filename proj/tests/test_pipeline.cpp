#include <doctest.h>

#include <fstream>
#include <sstream>

#include "evplan/errors.hpp"
#include "evplan/geo_io.hpp"
#include "evplan/pipeline.hpp"
#include "helpers.hpp"

using namespace evplan;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_config(const fs::path& out) {
    ScenarioConfig c;
    c.n_ev = 3000;
    c.monte_carlo.runs = 2;
    c.sweep.runs = 1;
    c.sweep.power_levels_kw = {3.7, 11.0, 22.0};
    c.analysis.capacities_kwp_per_ev = {0.5, 2.0};
    c.analysis.probability_curve_samples = 500;
    c.pv.optimize_orientation = false;
    c.out_dir = out;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json stable_manifest(const fs::path& dir) {
    auto m = read_json(dir / "manifest.json");
    m.erase("timestamps");
    for (auto& s : m["stages"]) s.erase("this_invocation");
    return m;
}

}  // namespace

TEST_CASE("zones-only run writes only the zone artifacts") {
    const auto dir = testutil::temp_dir("zones_only");
    Pipeline p(small_config(dir));
    const std::array<Stage, 1> only{Stage::zones};
    const auto out = p.run(only);
    REQUIRE(out.size() == 1);
    CHECK(fs::exists(dir / "zones.geojson"));
    CHECK(fs::exists(dir / "zones.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK_FALSE(fs::exists(dir / "mobility_zones.csv"));
    const auto m = read_json(dir / "manifest.json");
    CHECK(m["stages"].size() == 1);
    CHECK(m["tool"] == "evplan");
}

TEST_CASE("a stage without its upstream output names the stage to run") {
    const auto dir = testutil::temp_dir("missing");
    Pipeline p(small_config(dir));
    try {
        p.run_stage(Stage::demand);
        FAIL("expected MissingStageError");
    } catch (const MissingStageError& e) {
        CHECK(e.needed_stage() == "zones");
        CHECK(std::string(e.what()).find("evplan zones") != std::string::npos);
    }
    p.run_stage(Stage::zones);
    try {
        p.run_stage(Stage::indicators);
        FAIL("expected MissingStageError");
    } catch (const MissingStageError& e) {
        CHECK(e.needed_stage() == "mobility");
    }
}

TEST_CASE("full run: determinism, reuse and byte-identical caches") {
    const auto a = testutil::temp_dir("full_a");
    const auto b = testutil::temp_dir("full_b");
    {
        Pipeline p(small_config(a));
        const auto first = p.run(kAllStages);
        for (const auto& o : first) CHECK_FALSE(o.reused);
    }
    const auto m1 = stable_manifest(a);
    {
        Pipeline p(small_config(a));
        const auto second = p.run(kAllStages);
        for (const auto& o : second) CHECK(o.reused);
    }
    CHECK(stable_manifest(a) == m1);

    Pipeline fresh(small_config(b));
    fresh.run(kAllStages);
    CHECK(stable_manifest(b)["outputs"] == m1["outputs"]);
    for (const auto& f : m1["outputs"]) {
        const auto rel = f["path"].get<std::string>();
        CHECK_MESSAGE(slurp(a / rel) == slurp(b / rel), rel);
    }

    // a corrupted output forces recomputation with identical bytes
    const auto before = slurp(a / "load_profile_home.csv");
    std::ofstream(a / "load_profile_home.csv") << "garbage";
    Pipeline again(small_config(a));
    const std::array<Stage, 1> profiles{Stage::profiles};
    const auto r = again.run(profiles);
    CHECK_FALSE(r[0].reused);
    CHECK(slurp(a / "load_profile_home.csv") == before);

    const auto report = read_json(a / "report.json");
    CHECK(report["reference_load"]["share"].get<double>() > 0.0);
    CHECK(fs::exists(a / "indicators_daily.csv"));
    CHECK(fs::exists(a / "peak_vs_power.csv"));
}

TEST_CASE("a config change invalidates exactly the consuming stages") {
    const auto dir = testutil::temp_dir("keys");
    const auto base = small_config(dir);
    const Pipeline p0(base);
    auto keys = [](const Pipeline& p) {
        std::map<Stage, std::string> k;
        for (auto s : kAllStages) k[s] = p.stage_key(s);
        return k;
    };
    const auto k0 = keys(p0);

    auto pv_cfg = base;
    pv_cfg.pv.system.losses = 0.2;
    const auto k1 = keys(Pipeline(pv_cfg));
    for (auto s : {Stage::zones, Stage::mobility, Stage::demand, Stage::profiles, Stage::report}) CHECK(k1.at(s) == k0.at(s));
    CHECK(k1.at(Stage::pv) != k0.at(Stage::pv));
    CHECK(k1.at(Stage::indicators) != k0.at(Stage::indicators));

    auto cell = base;
    cell.cell_size_km = 2.5;
    const auto k2 = keys(Pipeline(cell));
    for (auto s : kAllStages) CHECK((s == Stage::pv ? k2.at(s) == k0.at(s) : k2.at(s) != k0.at(s)));

    auto runs = base;
    runs.monte_carlo.runs = 3;
    const auto k3 = keys(Pipeline(runs));
    CHECK(k3.at(Stage::profiles) != k0.at(Stage::profiles));
    CHECK(k3.at(Stage::report) != k0.at(Stage::report));
    CHECK(k3.at(Stage::demand) == k0.at(Stage::demand));
    CHECK(k3.at(Stage::indicators) == k0.at(Stage::indicators));
}

TEST_CASE("zone grid cache round trip") {
    const ScenarioConfig c;
    const ZoneGrid g = build_grid(c);
    const ZoneGrid h = zone_grid_from_json(zone_grid_to_json(g));
    REQUIRE(h.size() == g.size());
    CHECK(h.total_vehicles == g.total_vehicles);
    CHECK(h.zones[5].centroid == g.zones[5].centroid);
    CHECK(h.locate(g.zones[7].centroid) == g.locate(g.zones[7].centroid));
    CHECK(read_national_load(c.inputs.national_load).size() == 24);
}
