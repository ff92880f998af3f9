#include "evplan/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "evplan/errors.hpp"
#include "evplan/timeutil.hpp"

#ifndef EVPLAN_DATA_DIR
#define EVPLAN_DATA_DIR "data"
#endif

namespace evplan {

namespace fs = std::filesystem;

InputPaths InputPaths::sample() {
    const fs::path d = fs::path(EVPLAN_DATA_DIR) / "sample";
    return {d / "boundary.geojson",   d / "population.asc",
            d / "workplaces.csv",     d / "pois.csv",
            d / "weather_2020_synthetic.csv", d / "national_load_synthetic.csv"};
}

namespace {

std::string where(const std::string& src, const YAML::Node& n) {
    const auto m = n.Mark();
    return m.line >= 0 ? src + ":" + std::to_string(m.line + 1) : src;
}

/// Walks one YAML mapping, remembering which keys were consumed so that
/// anything left over can be reported as unknown.
class MapReader {
public:
    MapReader(YAML::Node node, std::string path, const std::string& src)
        : node_(std::move(node)), path_(std::move(path)), src_(src) {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            throw ConfigError(where(src_, node_) + ": '" + label() + "' must be a mapping");
    }

    YAML::Node take(const std::string& key) {
        seen_.insert(key);
        if (!node_ || node_.IsNull()) return YAML::Node();
        return node_[key];
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T>
    void get(const std::string& key, T& out) {
        const YAML::Node v = take(key);
        if (!v || v.IsNull()) return;
        out = convert<T>(v, key_path(key));
    }

    void get_path(const std::string& key, fs::path& out, const fs::path& base) {
        std::string s;
        get(key, s);
        if (s.empty()) return;
        const fs::path p(s);
        out = p.is_absolute() ? p : base / p;
    }

    MapReader child(const std::string& key) { return MapReader(take(key), key_path(key), src_); }

    void finish() const {
        if (!node_ || node_.IsNull()) return;
        for (const auto& kv : node_) {
            const auto k = kv.first.as<std::string>();
            if (!seen_.count(k)) throw ConfigError(where(src_, kv.first) + ": unknown key '" + key_path(k) + "'");
        }
    }

    template <class T>
    T convert(const YAML::Node& v, const std::string& path) const {
        try {
            if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<std::string>>) {
                if (!v.IsSequence()) throw ConfigError(where(src_, v) + ": '" + path + "' must be a list");
            } else if (!v.IsScalar()) {
                throw ConfigError(where(src_, v) + ": '" + path + "' must be a scalar");
            }
            return v.as<T>();
        } catch (const YAML::BadConversion&) {
            throw ConfigError(where(src_, v) + ": '" + path + "' has the wrong type");
        }
    }

    const YAML::Node& node() const { return node_; }
    const std::string& src() const { return src_; }
    const std::string& path() const { return path_; }

private:
    std::string label() const { return path_.empty() ? "<root>" : path_; }

    YAML::Node node_;
    std::string path_;
    const std::string& src_;
    std::set<std::string> seen_;
};

/// Re-raises a validation failure with the node's location and key path.
template <class Fn>
void check_at(const MapReader& r, const std::string& path, Fn&& fn) {
    if (!r.node() || r.node().IsNull()) return;
    try {
        fn();
    } catch (const ConfigError& e) {
        throw ConfigError(where(r.src(), r.node()) + ": '" + path + "': " + e.what());
    }
}

void read_shares(MapReader r, ChargingShares& s) {
    r.get("home", s.home);
    r.get("work", s.work);
    r.get("poi", s.poi);
    r.finish();
    check_at(r, r.path(), [&] { s.validate(); });
}

void read_arrival(MapReader r, NormalArrival& a) {
    r.get("mean_h", a.mean_h);
    r.get("sd_h", a.sd_h);
    r.finish();
}

std::vector<ChargerOption> read_options(const YAML::Node& seq, const std::string& path, const std::string& src) {
    if (!seq.IsSequence()) throw ConfigError(where(src, seq) + ": '" + path + "' must be a list");
    std::vector<ChargerOption> out;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        MapReader r(seq[k], path + "[" + std::to_string(k) + "]", src);
        ChargerOption o;
        r.get("power_kw", o.power_kw);
        r.get("probability", o.probability);
        r.finish();
        out.push_back(o);
    }
    return out;
}

std::vector<VehicleClass> read_classes(const YAML::Node& seq, const std::string& src) {
    if (!seq.IsSequence()) throw ConfigError(where(src, seq) + ": 'fleet.classes' must be a list");
    std::vector<VehicleClass> out;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        const std::string path = "fleet.classes[" + std::to_string(k) + "]";
        MapReader r(seq[k], path, src);
        VehicleClass c;
        std::string kind = "bev";
        r.get("name", c.name);
        r.get("kind", kind);
        r.get("share", c.share);
        r.get("battery_kwh", c.battery_kwh);
        r.get("consumption_kwh_per_km", c.consumption_kwh_per_km);
        double cap = 0.0;
        r.get("max_power_kw", cap);
        if (cap != 0.0) c.max_power_kw = cap;
        r.finish();
        if (kind == "bev")
            c.kind = VehicleKind::bev;
        else if (kind == "phev")
            c.kind = VehicleKind::phev;
        else
            throw ConfigError(where(src, seq[k]) + ": '" + path + ".kind' must be bev or phev");
        if (c.name.empty()) c.name = kind;
        out.push_back(c);
    }
    return out;
}

template <class Fn>
void guard(const std::string& ctx, Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
}

}  // namespace

bool is_known_scenario(const std::string& name) {
    return name == "home" || name == "work" || name == "mixed" || name == "custom";
}

ScenarioConfig parse_config(const std::string& text, const fs::path& base, const std::string& src) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(src + ":" + std::to_string(e.mark.line + 1) + ": YAML syntax error: " + e.msg);
    }
    ScenarioConfig c;
    MapReader r(root, "", src);
    r.get("seed", c.seed);
    {
        auto in = r.child("inputs");
        in.get_path("boundary", c.inputs.boundary, base);
        in.get_path("population", c.inputs.population, base);
        in.get_path("workplaces", c.inputs.workplaces, base);
        in.get_path("pois", c.inputs.pois, base);
        in.get_path("weather", c.inputs.weather, base);
        in.get_path("national_load", c.inputs.national_load, base);
        in.finish();
    }
    {
        auto z = r.child("zoning");
        z.get("cell_size_km", c.cell_size_km);
        z.finish();
    }
    {
        auto f = r.child("fleet");
        f.get("n_ev", c.n_ev);
        f.get("extra_daily_km", c.extra_daily_km);
        const YAML::Node classes = f.take("classes");
        if (classes && !classes.IsNull()) c.fleet.classes = read_classes(classes, src);
        f.finish();
        check_at(f, "fleet", [&] { c.fleet.validate(); });
    }
    {
        auto m = r.child("mobility");
        m.get("circuity_factor", c.mobility.circuity_factor);
        auto rt = m.child("routing");
        rt.get("enabled", c.mobility.routing_enabled);
        rt.get("base_url", c.mobility.routing.base_url);
        rt.get("matrix_path", c.mobility.routing.matrix_path);
        rt.get("api_key_env", c.mobility.routing.api_key_env);
        rt.get("timeout_s", c.mobility.routing.timeout_s);
        rt.get("max_batch", c.mobility.routing.max_batch);
        rt.get("max_in_flight", c.mobility.routing.max_in_flight);
        rt.get("max_attempts", c.mobility.routing.max_attempts);
        rt.get("backoff_s", c.mobility.routing.backoff_s);
        rt.get("circuity_samples", c.mobility.circuity_samples);
        rt.finish();
        m.finish();
    }
    {
        auto ch = r.child("charging");
        ch.get("scenarios", c.charging.scenarios);
        read_shares(ch.child("custom_shares"), c.charging.custom_shares);
        ch.get("eta", c.charging.eta);
        ch.get("respect_power_caps", c.charging.respect_power_caps);
        {
            auto s = ch.child("soc_threshold");
            s.get("mean", c.charging.soc.mean);
            s.get("sd", c.charging.soc.sd);
            s.get("min", c.charging.soc.min);
            s.get("max", c.charging.soc.max);
            std::string mode;
            s.get("bounding", mode);
            if (mode == "reject")
                c.charging.soc.bounding = SocThreshold::Bounding::reject;
            else if (mode == "clamp")
                c.charging.soc.bounding = SocThreshold::Bounding::clamp;
            else if (!mode.empty())
                throw ConfigError(where(src, s.node()["bounding"]) +
                                  ": 'charging.soc_threshold.bounding' must be clamp or reject");
            s.finish();
            check_at(s, "charging.soc_threshold", [&] { c.charging.soc.validate(); });
        }
        {
            auto a = ch.child("arrivals");
            read_arrival(a.child("home"), c.charging.arrivals.home);
            read_arrival(a.child("work"), c.charging.arrivals.work);
            a.finish();
        }
        {
            auto mx = ch.child("chargers");
            for (auto loc : kLocations) {
                const std::string key = to_string(loc);
                const YAML::Node n = mx.take(key);
                if (n && !n.IsNull()) c.charging.chargers.at(loc) = read_options(n, mx.key_path(key), src);
            }
            mx.finish();
            check_at(mx, "charging.chargers", [&] {
                c.charging.chargers.validate(ChargingShares{1.0 / 3, 1.0 / 3, 1.0 / 3});
            });
        }
        ch.finish();
    }
    {
        auto mc = r.child("monte_carlo");
        mc.get("runs", c.monte_carlo.runs);
        mc.get("step_minutes", c.monte_carlo.step_minutes);
        mc.finish();
    }
    {
        auto sw = r.child("sweep");
        sw.get("power_levels_kw", c.sweep.power_levels_kw);
        sw.get("arrival_sd_h", c.sweep.arrival_sd_h);
        sw.get("runs", c.sweep.runs);
        sw.finish();
    }
    {
        auto pv = r.child("pv");
        pv.get("latitude", c.pv.latitude);
        pv.get("longitude", c.pv.longitude);
        pv.get("utc_offset_h", c.pv.utc_offset_h);
        pv.get("year", c.pv.year);
        pv.get("optimize_orientation", c.pv.optimize_orientation);
        pv.get("fetch_from_pvgis", c.pv.fetch_from_pvgis);
        auto& s = c.pv.system;
        pv.get("module_efficiency", s.eta_pv);
        pv.get("temperature_coefficient", s.beta_t);
        pv.get("tilt_deg", s.tilt_deg);
        pv.get("azimuth_deg", s.azimuth_deg);
        pv.get("system_losses", s.losses);
        pv.get("a_r", s.a_r);
        pv.get("albedo", s.albedo);
        pv.get("u_c", s.u_c);
        pv.get("u_v", s.u_v);
        pv.get("absorption", s.alpha);
        pv.get("angular_losses", s.angular_losses);
        pv.finish();
    }
    {
        auto an = r.child("analysis");
        an.get("capacities_kwp_per_ev", c.analysis.capacities_kwp_per_ev);
        an.get("holidays", c.analysis.holidays);
        {
            auto fd = an.child("fleet_dynamics");
            fd.get("lambda", c.analysis.fleet_lambda);
            fd.get("s0", c.analysis.fleet_s0);
            fd.get("sigmas", c.analysis.fleet_sigmas);
            fd.get("target", c.analysis.fleet_target);
            fd.finish();
        }
        {
            auto rl = an.child("reference_load");
            rl.get("study_population", c.analysis.reference.study_population);
            rl.get("region_population", c.analysis.reference.region_population);
            rl.get("region_peak_mw", c.analysis.reference.region_peak_mw);
            rl.finish();
        }
        {
            auto pc = an.child("probability_curve");
            pc.get("energies_kwh", c.analysis.probability_curve_energies_kwh);
            pc.get("samples", c.analysis.probability_curve_samples);
            pc.finish();
        }
        an.finish();
    }
    {
        auto out = r.child("output");
        out.get_path("dir", c.out_dir, base);
        out.finish();
    }
    r.finish();
    guard(src, [&] { c.validate(); });
    return c;
}

ScenarioConfig load_config(const std::optional<fs::path>& path) {
    if (!path || path->empty()) {
        ScenarioConfig c;
        c.validate();
        return c;
    }
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path->string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path->parent_path().empty() ? fs::path(".") : path->parent_path(), path->string());
}

void ScenarioConfig::validate() const {
    if (!(cell_size_km > 0.0)) throw ConfigError("zoning.cell_size_km must be > 0");
    if (n_ev < 0) throw ConfigError("fleet.n_ev must be non-negative");
    if (!(extra_daily_km >= 0.0)) throw ConfigError("fleet.extra_daily_km must be non-negative");
    guard("fleet", [&] { fleet.validate(); });
    if (!(mobility.circuity_factor >= 1.0)) throw ConfigError("mobility.circuity_factor must be >= 1");
    if (mobility.routing_enabled && mobility.circuity_samples < 10)
        throw ConfigError("mobility.routing.circuity_samples must be >= 10");
    if (charging.scenarios.empty()) throw ConfigError("charging.scenarios must list at least one scenario");
    for (const auto& s : charging.scenarios)
        if (!is_known_scenario(s)) throw ConfigError("charging.scenarios: unknown scenario '" + s + "'");
    guard("charging.custom_shares", [&] { charging.custom_shares.validate(); });
    guard("charging.soc_threshold", [&] { charging.soc.validate(); });
    for (const auto& s : charging.scenarios) guard("charging", [&] { scenario(s).validate(); });
    if (monte_carlo.runs < 1) throw ConfigError("monte_carlo.runs must be >= 1");
    if (monte_carlo.step_minutes < 1 || 1440 % monte_carlo.step_minutes != 0)
        throw ConfigError("monte_carlo.step_minutes must divide 1440");
    if (sweep.runs < 1) throw ConfigError("sweep.runs must be >= 1");
    if (!(sweep.arrival_sd_h >= 0.0)) throw ConfigError("sweep.arrival_sd_h must be non-negative");
    for (double p : sweep.power_levels_kw)
        if (!(p > 0.0)) throw ConfigError("sweep.power_levels_kw must be positive");
    guard("pv", [&] { pv.system.validate(); });
    if (std::abs(pv.latitude) > 90.0 || std::abs(pv.longitude) > 180.0) throw ConfigError("pv site coordinates are invalid");
    if (std::abs(pv.utc_offset_h) > 14.0) throw ConfigError("pv.utc_offset_h is out of range");
    for (double k : analysis.capacities_kwp_per_ev)
        if (!(k >= 0.0)) throw ConfigError("analysis.capacities_kwp_per_ev must be non-negative");
    (void)holiday_days();
    guard("analysis.fleet_dynamics", [&] {
        for (double s : analysis.fleet_sigmas) FleetDynamics{analysis.fleet_lambda, s, analysis.fleet_s0}.validate();
    });
    if (!(analysis.fleet_target > 0.0 && analysis.fleet_target < 1.0))
        throw ConfigError("analysis.fleet_dynamics.target must lie in (0,1)");
    const auto& ref = analysis.reference;
    if (!(ref.study_population > 0.0 && ref.region_population > 0.0 && ref.region_peak_mw > 0.0))
        throw ConfigError("analysis.reference_load values must be positive");
    if (analysis.probability_curve_samples == 0) throw ConfigError("analysis.probability_curve.samples must be > 0");

    const std::pair<const char*, const fs::path*> files[] = {
        {"inputs.boundary", &inputs.boundary},     {"inputs.population", &inputs.population},
        {"inputs.workplaces", &inputs.workplaces}, {"inputs.pois", &inputs.pois},
        {"inputs.national_load", &inputs.national_load}};
    for (const auto& [key, p] : files)
        if (!fs::is_regular_file(*p)) throw ConfigError(std::string(key) + ": file not found: " + p->string());
    if (!pv.fetch_from_pvgis && !fs::is_regular_file(inputs.weather))
        throw ConfigError("inputs.weather: file not found: " + inputs.weather.string());
}

ChargingScenario ScenarioConfig::scenario(const std::string& name) const {
    ChargingScenario s;
    s.name = name;
    if (name == "home")
        s.shares = ChargingShares::all_home();
    else if (name == "work")
        s.shares = ChargingShares::all_work();
    else if (name == "mixed")
        s.shares = ChargingShares::mixed();
    else if (name == "custom")
        s.shares = charging.custom_shares;
    else
        throw ConfigError("unknown scenario '" + name + "'");
    s.arrivals = charging.arrivals;
    s.chargers = charging.chargers;
    s.eta = charging.eta;
    s.respect_power_caps = charging.respect_power_caps;
    return s;
}

std::vector<NamedShares> ScenarioConfig::selected_shares() const {
    std::vector<NamedShares> out;
    for (const auto& n : charging.scenarios) out.push_back({n, scenario(n).shares});
    return out;
}

std::vector<std::int64_t> ScenarioConfig::holiday_days() const {
    std::vector<std::int64_t> out;
    for (const auto& h : analysis.holidays) {
        std::int64_t d = 0;
        if (!timeutil::parse_date(h, d)) throw ConfigError("analysis.holidays: bad date '" + h + "'");
        out.push_back(d);
    }
    return out;
}

nlohmann::ordered_json config_to_json(const ScenarioConfig& c) {
    using J = nlohmann::ordered_json;
    auto shares = [](const ChargingShares& s) { return J{{"home", s.home}, {"work", s.work}, {"poi", s.poi}}; };
    J classes = J::array();
    for (const auto& k : c.fleet.classes) {
        J o{{"name", k.name},
            {"kind", k.kind == VehicleKind::bev ? "bev" : "phev"},
            {"share", k.share},
            {"battery_kwh", k.battery_kwh},
            {"consumption_kwh_per_km", k.consumption_kwh_per_km}};
        o["max_power_kw"] = k.max_power_kw ? J(*k.max_power_kw) : J(nullptr);
        classes.push_back(o);
    }
    J chargers = J::object();
    for (auto loc : kLocations) {
        J a = J::array();
        for (const auto& o : c.charging.chargers.at(loc)) a.push_back({{"power_kw", o.power_kw}, {"probability", o.probability}});
        chargers[to_string(loc)] = a;
    }
    const auto& s = c.pv.system;
    const auto& rt = c.mobility.routing;
    return J{
        {"seed", c.seed},
        {"inputs",
         {{"boundary", c.inputs.boundary.string()},
          {"population", c.inputs.population.string()},
          {"workplaces", c.inputs.workplaces.string()},
          {"pois", c.inputs.pois.string()},
          {"weather", c.inputs.weather.string()},
          {"national_load", c.inputs.national_load.string()}}},
        {"zoning", {{"cell_size_km", c.cell_size_km}}},
        {"fleet", {{"n_ev", c.n_ev}, {"extra_daily_km", c.extra_daily_km}, {"classes", classes}}},
        {"mobility",
         {{"circuity_factor", c.mobility.circuity_factor},
          {"routing",
           {{"enabled", c.mobility.routing_enabled},
            {"base_url", rt.base_url},
            {"matrix_path", rt.matrix_path},
            {"api_key_env", rt.api_key_env},
            {"timeout_s", rt.timeout_s},
            {"max_batch", rt.max_batch},
            {"max_in_flight", rt.max_in_flight},
            {"max_attempts", rt.max_attempts},
            {"backoff_s", rt.backoff_s},
            {"circuity_samples", c.mobility.circuity_samples}}}}},
        {"charging",
         {{"scenarios", c.charging.scenarios},
          {"custom_shares", shares(c.charging.custom_shares)},
          {"eta", c.charging.eta},
          {"respect_power_caps", c.charging.respect_power_caps},
          {"soc_threshold",
           {{"mean", c.charging.soc.mean},
            {"sd", c.charging.soc.sd},
            {"min", c.charging.soc.min},
            {"max", c.charging.soc.max},
            {"bounding", c.charging.soc.bounding == SocThreshold::Bounding::clamp ? "clamp" : "reject"}}},
          {"arrivals",
           {{"home", {{"mean_h", c.charging.arrivals.home.mean_h}, {"sd_h", c.charging.arrivals.home.sd_h}}},
            {"work", {{"mean_h", c.charging.arrivals.work.mean_h}, {"sd_h", c.charging.arrivals.work.sd_h}}}}},
          {"chargers", chargers}}},
        {"monte_carlo", {{"runs", c.monte_carlo.runs}, {"step_minutes", c.monte_carlo.step_minutes}}},
        {"sweep",
         {{"power_levels_kw", c.sweep.power_levels_kw},
          {"arrival_sd_h", c.sweep.arrival_sd_h},
          {"runs", c.sweep.runs}}},
        {"pv",
         {{"latitude", c.pv.latitude},
          {"longitude", c.pv.longitude},
          {"utc_offset_h", c.pv.utc_offset_h},
          {"year", c.pv.year},
          {"optimize_orientation", c.pv.optimize_orientation},
          {"fetch_from_pvgis", c.pv.fetch_from_pvgis},
          {"module_efficiency", s.eta_pv},
          {"temperature_coefficient", s.beta_t},
          {"tilt_deg", s.tilt_deg},
          {"azimuth_deg", s.azimuth_deg},
          {"system_losses", s.losses},
          {"a_r", s.a_r},
          {"albedo", s.albedo},
          {"u_c", s.u_c},
          {"u_v", s.u_v},
          {"absorption", s.alpha},
          {"angular_losses", s.angular_losses}}},
        {"analysis",
         {{"capacities_kwp_per_ev", c.analysis.capacities_kwp_per_ev},
          {"holidays", c.analysis.holidays},
          {"fleet_dynamics",
           {{"lambda", c.analysis.fleet_lambda},
            {"s0", c.analysis.fleet_s0},
            {"sigmas", c.analysis.fleet_sigmas},
            {"target", c.analysis.fleet_target}}},
          {"reference_load",
           {{"study_population", c.analysis.reference.study_population},
            {"region_population", c.analysis.reference.region_population},
            {"region_peak_mw", c.analysis.reference.region_peak_mw}}},
          {"probability_curve",
           {{"energies_kwh", c.analysis.probability_curve_energies_kwh},
            {"samples", c.analysis.probability_curve_samples}}}}},
        {"output", {{"dir", c.out_dir.string()}}},
    };
}

}  // namespace evplan
