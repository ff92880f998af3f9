// evplan: command-line front end for the EV charging demand pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "evplan/config.hpp"
#include "evplan/errors.hpp"
#include "evplan/kernels.hpp"
#include "evplan/pipeline.hpp"
#include "evplan/version.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitService = 4;

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<int> runs;
    std::string scenario;
    int threads = 0;
};

evplan::ScenarioConfig resolve(const GlobalFlags& f) {
    auto cfg = evplan::load_config(f.config.empty() ? std::nullopt : std::optional<std::filesystem::path>(f.config));
    if (f.seed) cfg.seed = *f.seed;
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.runs) cfg.monte_carlo.runs = *f.runs;
    if (!f.scenario.empty()) cfg.charging.scenarios = {f.scenario};
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evplan: spatial and temporal EV charging demand with PV complementarity"};
    app.set_version_flag("--version", std::string(evplan::kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags flags;
    app.add_option("--config,-c", flags.config, "YAML configuration file (defaults: bundled Addis Ababa case)");
    app.add_option("--seed", flags.seed, "master random seed");
    app.add_option("--out-dir,-o", flags.out_dir, "output directory");
    app.add_option("--runs", flags.runs, "Monte Carlo day realisations per scenario")->check(CLI::PositiveNumber);
    app.add_option("--scenario", flags.scenario, "restrict to one charging scenario")
        ->check(CLI::IsMember({"home", "work", "mixed", "custom"}));
    app.add_option("--threads", flags.threads, "cap on worker threads (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);

    std::vector<evplan::Stage> stages;
    const std::pair<const char*, const char*> verbs[] = {
        {"zones", "build the zone grid and allocate vehicles"},
        {"mobility", "distances, gravity trip matrix and vehicle-km"},
        {"demand", "spatial daily charging energy per zone"},
        {"profiles", "Monte Carlo load profiles, charging points, power sweep"},
        {"pv", "PV production per kWp (optimal fixed orientation)"},
        {"indicators", "EV-PV self-sufficiency over the year's weekdays"},
        {"report", "fleet dynamics, reference grid load and EV uptake"},
    };
    for (const auto& [name, help] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        sub->callback([&stages, n = std::string(name)] { stages = {*evplan::parse_stage(n)}; });
    }
    app.add_subcommand("run", "all stages in order")->callback([&stages] {
        stages.assign(evplan::kAllStages.begin(), evplan::kAllStages.end());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        evplan::set_thread_limit(flags.threads);
        const auto cfg = resolve(flags);
        evplan::Pipeline pipeline(cfg);
        const auto outcomes = pipeline.run(stages);
        for (const auto& o : outcomes) {
            std::printf("%-10s %s (%zu files) key %.12s\n", evplan::to_string(o.stage),
                        o.reused ? "reused" : "computed", o.outputs.size(), o.key.c_str());
        }
        std::printf("outputs in %s\n", cfg.out_dir.string().c_str());
        return 0;
    } catch (const evplan::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const evplan::MissingStageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const evplan::InputDataError& e) {
        std::cerr << "input data error: " << e.what() << '\n';
        return kExitInput;
    } catch (const evplan::ServiceError& e) {
        std::cerr << "service error: " << e.what() << '\n';
        return kExitService;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
