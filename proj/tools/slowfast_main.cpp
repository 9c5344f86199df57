#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "slowfast/catalog.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::string& suites_override, int jobs) {
    try {
        slowfast::ExperimentConfig cfg = slowfast::load_config(config_path);
        if (!suites_override.empty()) {
            cfg.suites.clear();
            std::string item;
            for (char c : suites_override + ",") {
                if (c == ',') {
                    if (!item.empty()) cfg.suites.push_back(item);
                    item.clear();
                } else {
                    item += c;
                }
            }
            if (cfg.suites.empty()) throw slowfast::ConfigError("--suites: empty suite list");
        }
        const std::string out = out_override.empty() ? cfg.output_path : out_override;
        const int rc = slowfast::run_experiment(cfg, out, jobs);
        std::printf("%s: results written to %s (exit %d)\n", rc == 0 ? "PASS" : "FAIL", out.c_str(),
                    rc);
        return rc;
    } catch (const slowfast::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int cmd_validate(const std::string& config_path) {
    try {
        slowfast::ExperimentConfig cfg = slowfast::load_config(config_path);
        // constructing the system also checks parameter names and ranges
        (void)slowfast::make_system(cfg.system_id, cfg.system_params);
        std::printf("ok: %s\n", config_path.c_str());
        return 0;
    } catch (const slowfast::ConfigError& e) {
        std::fprintf(stderr, "invalid: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "invalid: %s\n", e.what());
        return 2;
    }
}

int cmd_list_systems() {
    for (const auto& entry : slowfast::catalog_entries()) {
        std::printf("%-11s %s\n", entry.id.c_str(), entry.description.c_str());
        std::printf("%-11s defaults:", "");
        for (const auto& [key, val] : entry.defaults) std::printf(" %s=%g", key.c_str(), val);
        std::printf("\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slow-fast averaging, connection and normal-form experiment runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir, suites;
    int jobs = 1;

    auto* run = app.add_subcommand("run", "run the suites requested by a config file");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (default: config output_path)");
    run->add_option("--suites", suites, "comma-separated suite override");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "validate a config file and exit");
    validate->add_option("--config", config_path, "experiment config (JSON)")->required();

    app.add_subcommand("list-systems", "list built-in systems and their parameters");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, out_dir, suites, jobs);
    if (validate->parsed()) return cmd_validate(config_path);
    return cmd_list_systems();
}
