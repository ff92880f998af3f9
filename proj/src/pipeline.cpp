#include "evplan/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "evplan/analysis.hpp"
#include "evplan/csv.hpp"
#include "evplan/demand_spatial.hpp"
#include "evplan/demand_temporal.hpp"
#include "evplan/errors.hpp"
#include "evplan/geo_io.hpp"
#include "evplan/hashing.hpp"
#include "evplan/pv_model.hpp"
#include "evplan/routing_http.hpp"
#include "evplan/timeutil.hpp"
#include "evplan/version.hpp"
#include "evplan/weather_io.hpp"

namespace evplan {

namespace fs = std::filesystem;
using J = nlohmann::ordered_json;

const char* to_string(Stage s) {
    switch (s) {
        case Stage::zones: return "zones";
        case Stage::mobility: return "mobility";
        case Stage::demand: return "demand";
        case Stage::profiles: return "profiles";
        case Stage::pv: return "pv";
        case Stage::indicators: return "indicators";
        case Stage::report: return "report";
    }
    return "?";
}

std::optional<Stage> parse_stage(const std::string& name) {
    for (auto s : kAllStages)
        if (name == to_string(s)) return s;
    return std::nullopt;
}

std::vector<Stage> dependencies(Stage s) {
    switch (s) {
        case Stage::zones:
        case Stage::pv: return {};
        case Stage::mobility: return {Stage::zones};
        case Stage::demand:
        case Stage::profiles: return {Stage::zones, Stage::mobility};
        case Stage::indicators: return {Stage::zones, Stage::mobility, Stage::pv};
        case Stage::report: return {Stage::demand, Stage::profiles};
    }
    return {};
}

std::vector<double> read_national_load(const fs::path& path) {
    const auto t = csv::read(path);
    const int h = t.column("hour"), m = t.column("mw");
    if (h < 0 || m < 0) throw InputDataError(path.string() + ": national load needs columns hour,mw");
    std::vector<double> mw(t.rows.size());
    std::vector<bool> seen(t.rows.size(), false);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string where = path.string() + ":" + std::to_string(t.line_numbers[r]);
        const double hour = csv::to_double(t.rows[r][static_cast<std::size_t>(h)], where);
        const auto k = static_cast<std::size_t>(hour);
        if (hour != std::floor(hour) || hour < 0 || k >= mw.size() || seen[k])
            throw InputDataError(where + ": hours must be 0..n-1 without repeats");
        seen[k] = true;
        mw[k] = csv::to_double(t.rows[r][static_cast<std::size_t>(m)], where);
    }
    if (mw.size() != 24) throw InputDataError(path.string() + ": national load must have 24 hourly values");
    return mw;
}

ZoneGrid build_grid(const ScenarioConfig& c) {
    const auto boundary = read_boundary_geojson(c.inputs.boundary);
    ZoneGrid g = build_zone_grid(boundary, c.cell_size_km);
    if (c.inputs.population.extension() == ".csv")
        g = aggregate_population(std::move(g), read_population_csv(c.inputs.population));
    else
        g = aggregate_population(std::move(g), read_esri_ascii(c.inputs.population));
    g = aggregate_points(std::move(g), read_points(c.inputs.workplaces, PointKind::workplace));
    g = aggregate_points(std::move(g), read_points(c.inputs.pois, PointKind::poi));
    return allocate_vehicles(std::move(g), c.n_ev);
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

J xy_json(LonLat p) { return J::array({p.lon, p.lat}); }
LonLat lonlat_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }


struct MobilityState {
    DistanceMatrix dist;
    CircuityModel circuity;
    TripMatrix trips;
    MobilityResult mob;
};

J mobility_to_json(const MobilityState& m) {
    std::vector<int> src;
    for (auto s : m.dist.source) src.push_back(static_cast<int>(s));
    J dd = J::array();
    for (const auto& row : m.mob.distance_distribution) {
        J r = J::array();
        for (const auto& e : row) r.push_back(J::array({e.two_way_km, e.weight}));
        dd.push_back(r);
    }
    return {{"n", m.dist.n},
            {"km", m.dist.km},
            {"source", src},
            {"circuity", {{"factor", m.circuity.factor}, {"samples", m.circuity.samples}, {"rms_km", m.circuity.residual_rms_km}}},
            {"beta", m.trips.beta},
            {"p", m.trips.p},
            {"normalization", m.trips.normalization},
            {"vkm_out", m.mob.vkm_out},
            {"vkm_in", m.mob.vkm_in},
            {"distance_distribution", dd},
            {"fleet_mean_daily_km", m.mob.fleet_mean_daily_km},
            {"extra_daily_km", m.mob.extra_daily_km}};
}

MobilityState mobility_from_json(const nlohmann::json& j) {
    MobilityState m;
    m.dist.n = j.at("n").get<std::size_t>();
    m.dist.km = j.at("km").get<std::vector<double>>();
    for (int s : j.at("source").get<std::vector<int>>()) m.dist.source.push_back(static_cast<DistanceSource>(s));
    m.circuity.factor = j.at("circuity").at("factor").get<double>();
    m.circuity.samples = j.at("circuity").at("samples").get<std::size_t>();
    m.circuity.residual_rms_km = j.at("circuity").at("rms_km").get<double>();
    m.trips.n = m.dist.n;
    m.trips.beta = j.at("beta").get<double>();
    m.trips.p = j.at("p").get<std::vector<double>>();
    m.trips.normalization = j.at("normalization").get<std::vector<double>>();
    m.mob.vkm_out = j.at("vkm_out").get<std::vector<double>>();
    m.mob.vkm_in = j.at("vkm_in").get<std::vector<double>>();
    for (const auto& row : j.at("distance_distribution")) {
        std::vector<DistanceWeight> r;
        for (const auto& e : row) r.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        m.mob.distance_distribution.push_back(std::move(r));
    }
    m.mob.fleet_mean_daily_km = j.at("fleet_mean_daily_km").get<double>();
    m.mob.extra_daily_km = j.at("extra_daily_km").get<double>();
    return m;
}

J pv_to_json(const PVProfile& p, const Orientation& o) {
    return {{"tilt_deg", o.tilt_deg},
            {"azimuth_deg", o.azimuth_deg},
            {"step_h", p.step_h},
            {"utc_offset_h", p.utc_offset_h},
            {"t", p.t},
            {"kw_per_kwp", p.kw_per_kwp}};
}

PVProfile pv_from_json(const nlohmann::json& j) {
    PVProfile p;
    p.step_h = j.at("step_h").get<double>();
    p.utc_offset_h = j.at("utc_offset_h").get<double>();
    p.t = j.at("t").get<std::vector<double>>();
    p.kw_per_kwp = j.at("kw_per_kwp").get<std::vector<double>>();
    return p;
}

std::string opt(const std::optional<double>& v, int decimals) { return v ? csv::fixed(*v, decimals) : ""; }

}  // namespace

J zone_grid_to_json(const ZoneGrid& g) {
    J zones = J::array();
    for (const auto& z : g.zones) {
        J ring = J::array();
        for (const auto& p : z.polygon) ring.push_back(xy_json(p));
        zones.push_back({{"id", z.id},
                         {"row", z.row},
                         {"col", z.col},
                         {"centroid", xy_json(z.centroid)},
                         {"polygon", ring},
                         {"population", z.population},
                         {"workplaces", z.workplaces},
                         {"pois", z.pois},
                         {"n_ev", z.n_ev}});
    }
    return {{"cell_size_km", g.cell_size_km},
            {"projection_origin", xy_json(g.projection.origin())},
            {"origin", J::array({g.origin.x, g.origin.y})},
            {"nrows", g.nrows},
            {"ncols", g.ncols},
            {"cell_to_zone", g.cell_to_zone},
            {"total_population", g.total_population},
            {"total_workplaces", g.total_workplaces},
            {"total_pois", g.total_pois},
            {"total_vehicles", g.total_vehicles},
            {"zones", zones}};
}

ZoneGrid zone_grid_from_json(const nlohmann::json& j) {
    ZoneGrid g;
    g.cell_size_km = j.at("cell_size_km").get<double>();
    g.projection = LocalProjection(lonlat_from(j.at("projection_origin")));
    g.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
    g.nrows = j.at("nrows").get<int>();
    g.ncols = j.at("ncols").get<int>();
    g.cell_to_zone = j.at("cell_to_zone").get<std::vector<int>>();
    g.total_population = j.at("total_population").get<double>();
    g.total_workplaces = j.at("total_workplaces").get<std::int64_t>();
    g.total_pois = j.at("total_pois").get<std::int64_t>();
    g.total_vehicles = j.at("total_vehicles").get<std::int64_t>();
    for (const auto& zj : j.at("zones")) {
        TrafficZone z;
        z.id = zj.at("id").get<int>();
        z.row = zj.at("row").get<int>();
        z.col = zj.at("col").get<int>();
        z.centroid = lonlat_from(zj.at("centroid"));
        for (const auto& p : zj.at("polygon")) z.polygon.push_back(lonlat_from(p));
        z.population = zj.at("population").get<double>();
        z.workplaces = zj.at("workplaces").get<std::int64_t>();
        z.pois = zj.at("pois").get<std::int64_t>();
        z.n_ev = zj.at("n_ev").get<std::int64_t>();
        g.zones.push_back(std::move(z));
    }
    return g;
}

Pipeline::Pipeline(ScenarioConfig cfg, DistanceProvider* router)
    : cfg_(std::move(cfg)), router_(router), started_utc_(utc_now()) {}

fs::path Pipeline::cache_path(Stage s) const { return cfg_.out_dir / ".cache" / (std::string(to_string(s)) + ".json"); }

std::string Pipeline::input_hash(const std::string& name) const {
    if (auto it = input_hashes_.find(name); it != input_hashes_.end()) return it->second;
    std::string h;
    const auto& in = cfg_.inputs;
    if (name == "weather" && cfg_.pv.fetch_from_pvgis) {
        std::ostringstream os;
        os << "pvgis:" << cfg_.pv.latitude << ',' << cfg_.pv.longitude << ',' << cfg_.pv.year;
        h = sha256_hex(os.str());
    } else {
        const fs::path p = name == "boundary"     ? in.boundary
                           : name == "population" ? in.population
                           : name == "workplaces" ? in.workplaces
                           : name == "pois"       ? in.pois
                           : name == "weather"    ? in.weather
                                                  : in.national_load;
        h = sha256_file(p);
    }
    input_hashes_[name] = h;
    return h;
}

std::string Pipeline::stage_key(Stage s) const {
    const J c = config_to_json(cfg_);
    J k{{"stage", to_string(s)}, {"version", kVersion}};
    J inputs = J::object();
    J params = J::object();
    switch (s) {
        case Stage::zones:
            for (const char* n : {"boundary", "population", "workplaces", "pois"}) inputs[n] = input_hash(n);
            params["zoning"] = c["zoning"];
            params["n_ev"] = c["fleet"]["n_ev"];
            break;
        case Stage::mobility:
            params["mobility"] = c["mobility"];
            params["extra_daily_km"] = c["fleet"]["extra_daily_km"];
            if (cfg_.mobility.routing_enabled) params["seed"] = c["seed"];
            break;
        case Stage::demand:
            params["scenarios"] = c["charging"]["scenarios"];
            params["custom_shares"] = c["charging"]["custom_shares"];
            params["eta"] = c["charging"]["eta"];
            params["classes"] = c["fleet"]["classes"];
            break;
        case Stage::profiles:
            params["charging"] = c["charging"];
            params["classes"] = c["fleet"]["classes"];
            params["monte_carlo"] = c["monte_carlo"];
            params["sweep"] = c["sweep"];
            params["probability_curve"] = c["analysis"]["probability_curve"];
            params["seed"] = c["seed"];
            break;
        case Stage::pv:
            inputs["weather"] = input_hash("weather");
            params["pv"] = c["pv"];
            break;
        case Stage::indicators:
            params["charging"] = c["charging"];
            params["classes"] = c["fleet"]["classes"];
            params["step_minutes"] = c["monte_carlo"]["step_minutes"];
            params["capacities"] = c["analysis"]["capacities_kwp_per_ev"];
            params["holidays"] = c["analysis"]["holidays"];
            params["year"] = c["pv"]["year"];
            params["seed"] = c["seed"];
            break;
        case Stage::report:
            inputs["national_load"] = input_hash("national_load");
            params["fleet_dynamics"] = c["analysis"]["fleet_dynamics"];
            params["reference_load"] = c["analysis"]["reference_load"];
            break;
    }
    J deps = J::object();
    for (auto d : dependencies(s)) deps[to_string(d)] = stage_key(d);
    k["inputs"] = inputs;
    k["params"] = params;
    k["deps"] = deps;
    return sha256_hex(k.dump());
}

nlohmann::json Pipeline::load_cache(Stage s) const {
    const fs::path p = cache_path(s);
    if (!fs::is_regular_file(p)) return nullptr;
    auto doc = nlohmann::json::parse(read_file(p), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return nullptr;
    return doc;
}

nlohmann::json Pipeline::require(Stage consumer, Stage dep) const {
    auto doc = load_cache(dep);
    if (doc.is_null()) throw MissingStageError(to_string(consumer), to_string(dep));
    if (doc.value("key", "") != stage_key(dep)) throw MissingStageError(to_string(consumer), to_string(dep), true);
    return doc;
}

void Pipeline::write_text(const std::string& rel, const std::string& text, std::vector<std::string>& out) const {
    const fs::path p = cfg_.out_dir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InputDataError("cannot write " + p.string());
    f << text;
    out.push_back(rel);
}

void Pipeline::write_doc(const std::string& rel, const J& doc, std::vector<std::string>& out) const {
    write_json(cfg_.out_dir / rel, doc);
    out.push_back(rel);
}

StageOutcome Pipeline::run_stage(Stage s) {
    StageOutcome o;
    o.stage = s;
    o.key = stage_key(s);

    // Reuse when the cache is current and every recorded output is intact.
    if (auto cached = load_cache(s); !cached.is_null() && cached.value("key", "") == o.key) {
        bool intact = true;
        for (const auto& f : cached.value("outputs", nlohmann::json::array())) {
            const fs::path p = cfg_.out_dir / f.at("path").get<std::string>();
            if (!fs::is_regular_file(p) || sha256_file(p) != f.at("sha256").get<std::string>()) {
                intact = false;
                break;
            }
            o.outputs.push_back(f.at("path").get<std::string>());
        }
        if (intact) {
            o.reused = true;
            return o;
        }
        o.outputs.clear();
    }
    for (auto d : dependencies(s)) (void)require(s, d);

    J state;
    switch (s) {
        case Stage::zones: state = do_zones(o.outputs); break;
        case Stage::mobility: state = do_mobility(o.outputs); break;
        case Stage::demand: state = do_demand(o.outputs); break;
        case Stage::profiles: state = do_profiles(o.outputs); break;
        case Stage::pv: state = do_pv(o.outputs); break;
        case Stage::indicators: state = do_indicators(o.outputs); break;
        case Stage::report: state = do_report(o.outputs); break;
    }
    J files = J::array();
    for (const auto& rel : o.outputs) files.push_back({{"path", rel}, {"sha256", sha256_file(cfg_.out_dir / rel)}});
    J cache{{"stage", to_string(s)}, {"key", o.key}, {"outputs", files}, {"state", state}};
    write_json(cache_path(s), cache, -1);
    return o;
}

std::vector<StageOutcome> Pipeline::run(std::span<const Stage> stages) {
    std::vector<StageOutcome> out;
    for (auto s : stages) out.push_back(run_stage(s));
    write_manifest(out);
    return out;
}

J Pipeline::write_manifest(std::span<const StageOutcome> this_run) const {
    J inputs = J::object();
    const auto& in = cfg_.inputs;
    const std::pair<const char*, fs::path> files[] = {{"boundary", in.boundary},     {"population", in.population},
                                                      {"workplaces", in.workplaces}, {"pois", in.pois},
                                                      {"weather", in.weather},       {"national_load", in.national_load}};
    for (const auto& [name, path] : files) {
        if (std::string(name) == "weather" && cfg_.pv.fetch_from_pvgis) {
            inputs[name] = {{"path", "pvgis"}, {"sha256", input_hash(name)}};
            continue;
        }
        inputs[name] = {{"path", path.string()}, {"sha256", input_hash(name)}};
    }
    J stages = J::array();
    J outputs = J::array();
    for (auto s : kAllStages) {
        const auto cached = load_cache(s);
        if (cached.is_null() || cached.value("key", "") != stage_key(s)) continue;
        bool reused = false, ran = false;
        for (const auto& o : this_run)
            if (o.stage == s) {
                ran = true;
                reused = o.reused;
            }
        stages.push_back({{"stage", to_string(s)},
                          {"key", cached["key"]},
                          {"this_invocation", ran ? (reused ? "reused" : "computed") : "not run"}});
        for (const auto& f : cached["outputs"]) {
            const fs::path p = cfg_.out_dir / f.at("path").get<std::string>();
            outputs.push_back({{"path", f["path"]},
                               {"sha256", f["sha256"]},
                               {"bytes", fs::is_regular_file(p) ? fs::file_size(p) : 0}});
        }
    }
    const std::string cfg_hash = sha256_hex(config_to_json(cfg_).dump());
    J m{{"tool", "evplan"},
        {"version", kVersion},
        {"config_hash", cfg_hash},
        {"seed", cfg_.seed},
        {"inputs", inputs},
        {"stages", stages},
        {"outputs", outputs},
        {"timestamps", {{"started_utc", started_utc_}, {"finished_utc", utc_now()}}}};
    write_json(cfg_.out_dir / "manifest.json", m);
    return m;
}

J Pipeline::do_zones(std::vector<std::string>& out) {
    const ZoneGrid g = build_grid(cfg_);
    write_doc("zones.geojson", zones_to_geojson(g), out);
    std::ostringstream os;
    os << "zone_id,row,col,lon,lat,population,workplaces,pois,n_ev\n";
    for (const auto& z : g.zones)
        os << z.id << ',' << z.row << ',' << z.col << ',' << csv::fixed(z.centroid.lon, 6) << ','
           << csv::fixed(z.centroid.lat, 6) << ',' << csv::fixed(z.population, 1) << ',' << z.workplaces << ','
           << z.pois << ',' << z.n_ev << '\n';
    write_text("zones.csv", os.str(), out);
    return {{"grid", zone_grid_to_json(g)}};
}

J Pipeline::do_mobility(std::vector<std::string>& out) {
    const ZoneGrid g = zone_grid_from_json(require(Stage::mobility, Stage::zones).at("state").at("grid"));
    MobilityState m;
    std::unique_ptr<HttpMatrixRouter> http;
    DistanceProvider* router = router_;
    if (!router && cfg_.mobility.routing_enabled) {
        http = std::make_unique<HttpMatrixRouter>(cfg_.mobility.routing);
        router = http.get();
    }
    if (router) {
        const auto boundary = read_boundary_geojson(cfg_.inputs.boundary);
        m.circuity = estimate_circuity(boundary, *router, cfg_.mobility.circuity_samples, cfg_.seed);
    } else {
        m.circuity.factor = cfg_.mobility.circuity_factor;
    }
    m.dist = distance_matrix(g, router, m.circuity);
    m.trips = trip_probabilities(g, m.dist, compute_beta(g.cell_area_km2()));
    m.mob = vkm(g, m.trips, m.dist, cfg_.extra_daily_km);

    std::ostringstream zones;
    zones << "zone_id,n_ev,vkm_out_km,vkm_in_km\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        zones << i << ',' << g.zones[i].n_ev << ',' << csv::fixed(m.mob.vkm_out[i], 3) << ','
              << csv::fixed(m.mob.vkm_in[i], 3) << '\n';
    write_text("mobility_zones.csv", zones.str(), out);

    std::ostringstream trips;
    trips << "origin,destination,p,distance_km,distance_source\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            trips << i << ',' << j << ',' << csv::fixed(m.trips.at(i, j), 9) << ',' << csv::fixed(m.dist.at(i, j), 4)
                  << ',' << to_string(m.dist.source_at(i, j)) << '\n';
    write_text("trip_matrix.csv", trips.str(), out);

    const auto hist = distance_histogram(g, m.mob, 2.0);
    std::ostringstream h;
    h << "bin_start_km,bin_end_km,vehicles\n";
    for (std::size_t b = 0; b < hist.vehicles.size(); ++b)
        h << csv::fixed(b * hist.bin_km, 1) << ',' << csv::fixed((b + 1) * hist.bin_km, 1) << ','
          << csv::fixed(hist.vehicles[b], 2) << '\n';
    write_text("distance_histogram.csv", h.str(), out);

    std::size_t routed = 0;
    for (auto s : m.dist.source) routed += s == DistanceSource::routed;
    write_doc("mobility_summary.json",
              J{{"zones", g.size()},
                {"beta_per_km", m.trips.beta},
                {"circuity_factor", m.circuity.factor},
                {"circuity_samples", m.circuity.samples},
                {"routed_pairs", routed},
                {"intra_zonal_km", intra_zonal_distance(g.cell_area_km2())},
                {"fleet_mean_daily_km", m.mob.fleet_mean_daily_km}},
              out);
    return mobility_to_json(m);
}

J Pipeline::do_demand(std::vector<std::string>& out) {
    const ZoneGrid g = zone_grid_from_json(require(Stage::demand, Stage::zones).at("state").at("grid"));
    const MobilityState m = mobility_from_json(require(Stage::demand, Stage::mobility).at("state"));
    J summary = J::object();
    for (const auto& [name, shares] : cfg_.selected_shares()) {
        const auto d = spatial_demand(m.mob, g, shares, cfg_.fleet, cfg_.charging.eta);
        write_doc("demand_" + name + ".geojson", demand_to_geojson(d, g), out);
        write_text("demand_" + name + ".csv", demand_to_csv(d), out);
        const double n = static_cast<double>(std::max<std::int64_t>(g.total_vehicles, 1));
        summary[name] = {{"home_mwh", d.totals.home_kwh / 1000.0},
                         {"work_mwh", d.totals.work_kwh / 1000.0},
                         {"poi_mwh", d.totals.poi_kwh / 1000.0},
                         {"total_mwh", d.grand_total_kwh() / 1000.0},
                         {"per_vehicle_kwh", d.grand_total_kwh() / n}};
    }
    write_doc("demand_summary.json", summary, out);
    return {{"summary", summary}};
}

J Pipeline::do_profiles(std::vector<std::string>& out) {
    const ZoneGrid g = zone_grid_from_json(require(Stage::profiles, Stage::zones).at("state").at("grid"));
    const MobilityState m = mobility_from_json(require(Stage::profiles, Stage::mobility).at("state"));
    const auto fleet = build_fleet(g, m.mob, cfg_.fleet, cfg_.charging.soc, cfg_.seed);
    const DestinationSampler dest(m.trips, g);
    const int nz = static_cast<int>(g.size());
    const double step = cfg_.monte_carlo.step_h();

    J summary = J::object();
    std::ostringstream points;
    points << "scenario,location,assigned_evs,ratio,points,reported\n";
    for (const auto& name : cfg_.charging.scenarios) {
        const auto sc = cfg_.scenario(name);
        const auto mc = monte_carlo_days(fleet, sc, dest, nz, cfg_.monte_carlo.runs, cfg_.seed, step, true);
        write_text("load_profile_" + name + ".csv",
                   load_profile_to_csv(mc.mean_per_zone, mc.mean_total, nz, step, mc.sd_total), out);
        write_text("sessions_" + name + "_run0.csv", sessions_to_csv(mc.sessions.front(), "2020-01-06"), out);

        double charging = 0.0, worst = 0.0;
        for (const auto& d : mc.days) {
            charging += static_cast<double>(d.charging);
            worst += d.worst_case_kw;
        }
        const double runs = static_cast<double>(mc.days.size());
        charging /= runs;
        worst /= runs;
        const auto req = charging_point_requirements(std::span<const DayStats>(mc.days), sc.shares, g.total_vehicles);
        J reqj = J::array();
        for (const auto& r : req) {
            points << name << ',' << to_string(r.location) << ',' << csv::fixed(r.assigned_evs, 0) << ','
                   << csv::fixed(r.ratio, 4) << ',' << r.points << ',' << r.reported << '\n';
            reqj.push_back({{"location", to_string(r.location)},
                            {"assigned_evs", r.assigned_evs},
                            {"ratio", r.ratio},
                            {"points", r.points},
                            {"reported", r.reported}});
        }
        const double n = static_cast<double>(std::max<std::int64_t>(g.total_vehicles, 1));
        summary[name] = {{"runs", mc.days.size()},
                         {"charging_fraction", charging / n},
                         {"mean_peak_kw", mc.mean_peak_kw()},
                         {"sd_peak_kw", mc.sd_peak_kw()},
                         {"peak_of_mean_kw", mc.peak_of_mean_kw()},
                         {"peak_of_mean_time_h", static_cast<double>(mc.peak_of_mean_bin()) * step},
                         {"peak_per_charging_ev_kw", charging > 0 ? mc.peak_of_mean_kw() / charging : 0.0},
                         {"worst_case_kw", worst},
                         {"energy_mwh", [&] {
                              double e = 0.0;
                              for (const auto& d : mc.days) e += d.energy_kwh;
                              return e / runs / 1000.0;
                          }()},
                         {"charging_points", reqj}};
    }
    write_text("charging_points.csv", points.str(), out);

    const auto sweep = peak_vs_power_sweep(fleet, dest, nz, cfg_.sweep.power_levels_kw, cfg_.sweep.arrival_sd_h,
                                           cfg_.sweep.runs, cfg_.seed, cfg_.charging.eta, step);
    std::ostringstream sw;
    sw << "power_kw,peak_kw_mean,peak_kw_sd,simultaneous_share_mean,simultaneous_share_sd\n";
    J swj = J::array();
    for (const auto& p : sweep) {
        sw << csv::fixed(p.power_kw, 2) << ',' << csv::fixed(p.peak_kw_mean, 3) << ',' << csv::fixed(p.peak_kw_sd, 3)
           << ',' << csv::fixed(p.simultaneous_share_mean, 6) << ',' << csv::fixed(p.simultaneous_share_sd, 6) << '\n';
        swj.push_back({{"power_kw", p.power_kw}, {"peak_kw", p.peak_kw_mean}, {"share", p.simultaneous_share_mean}});
    }
    write_text("peak_vs_power.csv", sw.str(), out);

    std::ostringstream pc;
    pc << "vehicle_class,battery_kwh,e_daily_kwh,probability_mean,probability_sd\n";
    for (const auto& cls : cfg_.fleet.classes) {
        const auto curve = charging_probability_curve(cfg_.analysis.probability_curve_energies_kwh, cls.battery_kwh,
                                                      cfg_.charging.soc, cfg_.analysis.probability_curve_samples,
                                                      cfg_.seed);
        for (const auto& p : curve)
            pc << cls.name << ',' << csv::fixed(cls.battery_kwh, 1) << ',' << csv::fixed(p.e_daily_kwh, 2) << ','
               << csv::fixed(p.mean, 6) << ',' << csv::fixed(p.sd, 6) << '\n';
    }
    write_text("charging_probability.csv", pc.str(), out);

    write_doc("profiles_summary.json", J{{"scenarios", summary}, {"peak_vs_power", swj}}, out);
    return {{"summary", summary}};
}

J Pipeline::do_pv(std::vector<std::string>& out) {
    WeatherSeries w = cfg_.pv.fetch_from_pvgis
                          ? fetch_pvgis_year(cfg_.pv.latitude, cfg_.pv.longitude, cfg_.pv.year, cfg_.pv.utc_offset_h)
                          : read_weather_csv(cfg_.inputs.weather, cfg_.pv.latitude, cfg_.pv.longitude,
                                             cfg_.pv.utc_offset_h);
    if (cfg_.pv.fetch_from_pvgis) write_text("weather_pvgis.csv", weather_to_csv(w), out);
    PVSystemSpec spec = cfg_.pv.system;
    Orientation o{spec.tilt_deg, spec.azimuth_deg, 0.0};
    if (cfg_.pv.optimize_orientation) {
        o = optimal_orientation(w, spec);
        spec.tilt_deg = o.tilt_deg;
        spec.azimuth_deg = o.azimuth_deg;
    }
    const PVProfile p = simulate_pv(w, spec);
    o.yield_kwh_per_kwp = p.annual_yield_kwh_per_kwp();
    write_text("pv_profile.csv", pv_profile_to_csv(p), out);
    write_doc("pv_summary.json",
              J{{"tilt_deg", o.tilt_deg},
                {"azimuth_deg", o.azimuth_deg},
                {"annual_yield_kwh_per_kwp", o.yield_kwh_per_kwp},
                {"mean_daily_kwh_per_kwp", o.yield_kwh_per_kwp / (static_cast<double>(w.records.size()) * p.step_h / 24.0)},
                {"records", w.records.size()},
                {"irradiance_closure_mismatches", w.closure_mismatches()}},
              out);
    return pv_to_json(p, o);
}

J Pipeline::do_indicators(std::vector<std::string>& out) {
    const ZoneGrid g = zone_grid_from_json(require(Stage::indicators, Stage::zones).at("state").at("grid"));
    const MobilityState m = mobility_from_json(require(Stage::indicators, Stage::mobility).at("state"));
    const PVProfile pv = pv_from_json(require(Stage::indicators, Stage::pv).at("state"));
    const auto fleet = build_fleet(g, m.mob, cfg_.fleet, cfg_.charging.soc, cfg_.seed);
    const DestinationSampler dest(m.trips, g);
    const int nz = static_cast<int>(g.size());
    const double step = cfg_.monte_carlo.step_h();
    const auto holidays = cfg_.holiday_days();
    const auto days = weekdays(cfg_.pv.year, holidays);
    const double n_ev = static_cast<double>(g.total_vehicles);

    std::ostringstream daily, monthly;
    daily << "date,scenario,kwp_per_ev,self_sufficiency,self_consumption,energy_coverage,pv_kwh,ev_kwh\n";
    monthly << "scenario,kwp_per_ev,month,days,ss_mean,ss_sd\n";
    J box = J::object();
    J summary = J::object();
    for (const auto& name : cfg_.charging.scenarios) {
        const auto sc = cfg_.scenario(name);
        // One EV-load realisation per calendar day, seeded by the day number.
        const DailyLoadFn load = [&](std::int64_t day, std::size_t) {
            const auto sessions =
                simulate_day(fleet, sc, dest, cfg_.seed, static_cast<std::uint64_t>(day), Execution::serial);
            return aggregate_load(sessions, step, nz, Execution::serial).total;
        };
        const auto res = capacity_sweep(pv, load, cfg_.analysis.capacities_kwp_per_ev, n_ev, days, step);
        J per_cap = J::array();
        J sum_cap = J::array();
        for (const auto& r : res) {
            for (const auto& d : r.days)
                daily << timeutil::format_date(d.day) << ',' << name << ',' << csv::fixed(r.kwp_per_ev, 2) << ','
                      << opt(d.ss, 6) << ',' << opt(d.sc, 6) << ',' << opt(d.coverage, 6) << ','
                      << csv::fixed(d.pv_kwh, 3) << ',' << csv::fixed(d.ev_kwh, 3) << '\n';
            J months = J::array();
            for (const auto& ms : r.monthly) {
                monthly << name << ',' << csv::fixed(r.kwp_per_ev, 2) << ',' << ms.month << ',' << ms.n << ','
                        << csv::fixed(ms.mean, 6) << ',' << csv::fixed(ms.sd, 6) << '\n';
                months.push_back({{"month", ms.month}, {"n", ms.n}, {"mean", ms.mean}, {"sd", ms.sd}});
            }
            per_cap.push_back({{"kwp_per_ev", r.kwp_per_ev}, {"self_sufficiency", box_stats_to_json(r.ss_box)}, {"monthly", months}});
            sum_cap.push_back({{"kwp_per_ev", r.kwp_per_ev},
                               {"ss_mean", r.ss_box.mean},
                               {"mean_coverage", r.mean_coverage}});
        }
        box[name] = per_cap;
        summary[name] = sum_cap;
    }
    write_text("indicators_daily.csv", daily.str(), out);
    write_text("indicators_monthly.csv", monthly.str(), out);
    write_doc("indicators_boxplot.json", J{{"weekdays", days.size()}, {"scenarios", box}}, out);
    return {{"summary", summary}};
}

J Pipeline::do_report(std::vector<std::string>& out) {
    const auto demand = require(Stage::report, Stage::demand).at("state").at("summary");
    const auto profiles = require(Stage::report, Stage::profiles).at("state").at("summary");
    const auto& a = cfg_.analysis;

    std::ostringstream fd;
    fd << "year";
    for (double s : a.fleet_sigmas) fd << ",share_sigma_" << csv::fixed(s, 2);
    fd << '\n';
    for (int y = 0; y <= 50; ++y) {
        fd << y;
        for (double s : a.fleet_sigmas) fd << ',' << csv::fixed(fleet_share(y, {a.fleet_lambda, s, a.fleet_s0}), 6);
        fd << '\n';
    }
    write_text("fleet_dynamics.csv", fd.str(), out);
    J ttt = J::array();
    for (double s : a.fleet_sigmas) {
        J e{{"sigma", s}, {"target", a.fleet_target}};
        try {
            e["years"] = time_to_share(a.fleet_target, {a.fleet_lambda, s, a.fleet_s0});
        } catch (const ConfigError&) {
            e["years"] = nullptr;  // unreachable for this sigma
        }
        ttt.push_back(e);
    }

    const auto national = read_national_load(cfg_.inputs.national_load);
    const auto ref = scale_reference_load(national, a.reference.study_population, a.reference.region_population,
                                          a.reference.region_peak_mw);
    std::ostringstream rl;
    rl << "hour,national_mw,city_mw\n";
    for (std::size_t h = 0; h < national.size(); ++h)
        rl << h << ',' << csv::fixed(national[h], 3) << ',' << csv::fixed(ref.city_mw[h], 3) << '\n';
    write_text("reference_load.csv", rl.str(), out);

    J uptake = J::object();
    for (auto it = demand.begin(); it != demand.end(); ++it) {
        const double ev = it.value().at("total_mwh").get<double>();
        J u{{"ev_daily_mwh", ev}, {"uptake_percent", ev_uptake_percent(ev, ref)}};
        if (profiles.contains(it.key())) {
            const double worst_mw = profiles.at(it.key()).at("worst_case_kw").get<double>() / 1000.0;
            u["worst_case_mw"] = worst_mw;
            u["worst_case_percent_of_city_peak"] = 100.0 * worst_mw / ref.peak_mw();
        }
        uptake[it.key()] = u;
    }
    write_doc("report.json",
              J{{"fleet_dynamics", {{"lambda", a.fleet_lambda}, {"s0", a.fleet_s0}, {"time_to_target", ttt}}},
                {"reference_load",
                 {{"share", ref.share}, {"city_peak_mw", ref.peak_mw()}, {"city_daily_mwh", ref.daily_energy_mwh()}}},
                {"ev_uptake", uptake},
                {"profiles", profiles}},
              out);
    return J::object();
}

}  // namespace evplan
