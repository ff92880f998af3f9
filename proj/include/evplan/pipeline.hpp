#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "evplan/config.hpp"
#include "evplan/mobility.hpp"

namespace evplan {

enum class Stage { zones, mobility, demand, profiles, pv, indicators, report };
inline constexpr std::array<Stage, 7> kAllStages{Stage::zones,    Stage::mobility,   Stage::demand, Stage::profiles,
                                                 Stage::pv,       Stage::indicators, Stage::report};

const char* to_string(Stage s);
std::optional<Stage> parse_stage(const std::string& name);
/// Direct upstream stages.
std::vector<Stage> dependencies(Stage s);

struct StageOutcome {
    Stage stage = Stage::zones;
    std::string key;
    bool reused = false;
    std::vector<std::string> outputs;  ///< relative to the out dir
};

/// Runs pipeline stages against one out dir. Each stage has a key hashed
/// from the config fields and input files it reads plus its upstream keys;
/// a stage whose cache carries the current key and whose outputs are intact
/// is reused instead of recomputed.
class Pipeline {
public:
    explicit Pipeline(ScenarioConfig cfg, DistanceProvider* router = nullptr);

    /// Runs one stage; upstream caches must be current (MissingStageError otherwise).
    StageOutcome run_stage(Stage s);
    /// Runs the listed stages in order and rewrites the manifest.
    std::vector<StageOutcome> run(std::span<const Stage> stages);

    std::string stage_key(Stage s) const;
    const ScenarioConfig& config() const { return cfg_; }
    std::filesystem::path out_dir() const { return cfg_.out_dir; }
    std::filesystem::path cache_path(Stage s) const;

    /// Writes manifest.json for the stages whose caches are current.
    nlohmann::ordered_json write_manifest(std::span<const StageOutcome> this_run) const;

private:
    nlohmann::json load_cache(Stage s) const;
    nlohmann::json require(Stage consumer, Stage dep) const;
    std::string input_hash(const std::string& name) const;

    nlohmann::ordered_json do_zones(std::vector<std::string>& out);
    nlohmann::ordered_json do_mobility(std::vector<std::string>& out);
    nlohmann::ordered_json do_demand(std::vector<std::string>& out);
    nlohmann::ordered_json do_profiles(std::vector<std::string>& out);
    nlohmann::ordered_json do_pv(std::vector<std::string>& out);
    nlohmann::ordered_json do_indicators(std::vector<std::string>& out);
    nlohmann::ordered_json do_report(std::vector<std::string>& out);

    void write_text(const std::string& rel, const std::string& text, std::vector<std::string>& out) const;
    void write_doc(const std::string& rel, const nlohmann::ordered_json& doc, std::vector<std::string>& out) const;

    ScenarioConfig cfg_;
    DistanceProvider* router_ = nullptr;
    mutable std::map<std::string, std::string> input_hashes_;
    std::string started_utc_;
};

/// Zones with population, workplaces, POIs and vehicles from the configured inputs.
ZoneGrid build_grid(const ScenarioConfig& cfg);
/// Hourly national load (CSV hour,mw; 24 rows).
std::vector<double> read_national_load(const std::filesystem::path& path);

/// Cache (de)serialisation, exposed for tests.
nlohmann::ordered_json zone_grid_to_json(const ZoneGrid& g);
ZoneGrid zone_grid_from_json(const nlohmann::json& j);

}  // namespace evplan
