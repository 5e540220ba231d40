// cavmem: single runs, sweeps, design and capacity reports.

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "cavmem/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Cavity-assisted Raman quantum memory simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::optional<double> dt_ratio;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    };
    auto* run = app.add_subcommand("run", "store and retrieve one pulse");
    add_common(run);
    run->add_option("--dt-ratio", dt_ratio, "override integrator steps per switching time");
    run->add_option("--seed", seed, "override the micro-oracle atom placement seed");

    auto* sweep = app.add_subcommand("sweep", "evaluate a parameter grid");
    add_common(sweep);
    sweep->add_option("--workers", workers, "parallel workers")->capture_default_str();
    sweep->add_option("--dt-ratio", dt_ratio, "override integrator steps per switching time");
    sweep->add_option("--seed", seed, "override the micro-oracle atom placement seed");

    auto* design = app.add_subcommand("design", "solid-state design point report");
    add_common(design);
    auto* capacity = app.add_subcommand("capacity", "transverse-mode and pulse capacity report");
    add_common(capacity);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cavmem::cli::kConfigError;
    }

    const cavmem::cli::Overrides ov{dt_ratio, seed};
    if (*run) return cavmem::cli::cmd_run(config_path, out_dir, ov);
    if (*sweep) return cavmem::cli::cmd_sweep(config_path, out_dir, workers, ov);
    if (*design) return cavmem::cli::cmd_design(config_path, out_dir);
    return cavmem::cli::cmd_capacity(config_path, out_dir);
}
