#include <chrono>
#include <ctime>
#include <iostream>

#include "CLI11.hpp"
#include "sbridge/schrodinger.hpp"
#include "sbridge_tools/config.hpp"
#include "sbridge_tools/runner.hpp"

using namespace sbridge::tools;

namespace {

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schrödinger bridge inequality batteries"};
    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool list = false, check_only = false;
    app.add_option("--config", config_path, "experiment config (YAML)");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "seed override");
    app.add_flag("--list-scenarios", list, "print the scenario names and exit");
    app.add_flag("--validate", check_only, "validate the config and exit");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& s : scenario_names()) std::cout << s << '\n';
        return kAllPass;
    }
    if (config_path.empty()) {
        std::cerr << "--config is required\n";
        return kConfigError;
    }

    ExperimentConfig cfg;
    try {
        auto root = load_yaml_file(config_path);
        if (seed_opt->count() && !root["seed"]) root["seed"] = seed;
        bool bad = false;
        for (const auto& d : validate(root)) {
            std::cerr << config_path << ": " << to_string(d) << '\n';
            bad = bad || d.level == Diagnostic::Level::Error;
        }
        if (bad) return kConfigError;
        if (check_only) return kAllPass;
        cfg = parse(root);
    } catch (const std::exception& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return kConfigError;
    }
    if (seed_opt->count()) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    try {
        auto res = run(cfg, utc_now());
        std::size_t failed = 0;
        for (const auto& r : res.reports) failed += !r.pass;
        std::cout << cfg.scenario << ": " << res.reports.size() << " reports, " << failed << " failed; outputs in "
                  << cfg.out_dir << '\n';
        if (!res.message.empty()) std::cerr << res.message << '\n';
        return res.exit_code;
    } catch (const sbridge::NotConverged& e) {
        std::cerr << e.what() << '\n';
        return kNonConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNonConvergence;
    }
}
