#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shapelab/artifacts.hpp"
#include "shapelab/config.hpp"
#include "shapelab/parallel.hpp"
#include "shapelab/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out;
    int jobs = shapelab::default_jobs();
    std::optional<std::uint64_t> seed;
    std::optional<std::string> cache;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out, "output directory (overrides config output_dir)");
    cmd->add_option("--jobs", args.jobs, "parallel workers")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--cache", args.cache,
                    "MDP cache directory (defaults to $SHAPELAB_CACHE, then <out>/cache)");
}

int run(shapelab::ExperimentKind kind, const CommonArgs& args) {
    using namespace shapelab;
    ExperimentConfig cfg;
    try {
        cfg = load_config(args.config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
    if (cfg.experiment_explicit && cfg.experiment != kind) {
        std::cerr << "config error: config declares experiment '" << to_string(cfg.experiment)
                  << "' but subcommand is '" << to_string(kind) << "'\n";
        return kExitConfig;
    }
    cfg.experiment = kind;  // run_experiment re-validates for this kind

    RunOptions opts;
    opts.jobs = args.jobs;
    if (!args.out.empty()) opts.out_override = args.out;
    opts.seed_override = args.seed;
    opts.cache_override = args.cache;

    const RunStatus status = run_experiment(std::move(cfg), opts);
    if (status.exit_code != kExitOk) {
        std::cerr << "error: " << status.message << "\n";
    }
    return status.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shapelab: tabular reward-shaping experiments"};
    app.set_version_flag("--version", std::string(shapelab::version_string()));
    app.require_subcommand(1);

    CommonArgs args;
    const std::pair<const char*, shapelab::ExperimentKind> kinds[] = {
        {"solve", shapelab::ExperimentKind::solve},
        {"sweep", shapelab::ExperimentKind::sweep},
        {"compare", shapelab::ExperimentKind::compare},
        {"distribution", shapelab::ExperimentKind::distribution},
        {"invariance", shapelab::ExperimentKind::invariance},
    };
    for (const auto& [name, kind] : kinds) {
        CLI::App* cmd = app.add_subcommand(name, std::string("run a ") + name + " experiment");
        add_common(cmd, args);
        cmd->callback([&args, kind] { std::exit(run(kind, args)); });
    }

    CLI11_PARSE(app, argc, argv);
    return 0;
}
