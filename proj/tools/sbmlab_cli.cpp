#include "sbmlab/config.hpp"
#include "sbmlab/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"sbmlab: super-Brownian motion with irregular drift, log-Laplace PDE, dual process and duality checks"};
    app.require_subcommand(1, 1);

    sbm::RunOptions opts;
    std::string out_dir = "runs";
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::string config_path;
    std::string preset;

    for (const auto& name : sbm::subcommands()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "YAML config file");
        sub->add_option("--preset", preset, "built-in config")->check(CLI::IsMember(sbm::Config::preset_names()));
        sub->add_option("--seed", seed, "master seed (overrides the config)");
        sub->add_option("--paths", paths, "Monte Carlo path count (overrides the config)");
        sub->add_option("--out-dir", out_dir, "directory receiving run folders")->capture_default_str();
        sub->add_option("--override", opts.overrides, "dotted key=value, repeatable")->take_all();
        sub->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sbm::kExitSchema;
    }

    opts.subcommand = app.get_subcommands().front()->get_name();
    auto* sub = app.get_subcommands().front();
    if (!config_path.empty()) opts.config_path = config_path;
    if (!preset.empty()) opts.preset = preset;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--paths")) opts.paths = paths;
    opts.out_dir = out_dir;

    const auto result = sbm::run(opts);
    (result.exit_code == 0 ? std::cout : std::cerr) << result.message << '\n';
    return result.exit_code;
}
