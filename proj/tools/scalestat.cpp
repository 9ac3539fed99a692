// scalestat: benchmark harness for the scalable-statistics toolkit.
//
// Usage:
//   scalestat <experiment> --config <path> [--seed N] [--out DIR] [--threads K]
//   scalestat validate --config <path>
//
// Experiments: blb-curve, dfc-accuracy, dfc-runtime, tradeoff-sparse-pca,
// tradeoff-cut-matrix. Exit codes: 0 success, 2 config error, 3 numerical
// failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scalestat/scalestat.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::int64_t seed = -1;
    std::string out_dir;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonOptions& opts, bool with_run_flags) {
    sub->add_option("--config", opts.config_path, "experiment config file")->required();
    if (with_run_flags) {
        sub->add_option("--seed", opts.seed, "RNG seed (overrides config key 'seed')");
        sub->add_option("--out", opts.out_dir, "output directory (overrides config key 'out')");
        sub->add_option("--threads", opts.threads,
                        "worker threads (overrides config key 'threads')");
    }
}

int run(const std::string& experiment, const CommonOptions& opts) {
    const scalestat::Config cfg = scalestat::Config::load(opts.config_path);
    scalestat::validate_experiment_config(experiment, cfg);
    const std::uint64_t seed =
        opts.seed >= 0 ? static_cast<std::uint64_t>(opts.seed)
                       : static_cast<std::uint64_t>(cfg.get_int("seed", 12345));
    const int threads =
        opts.threads > 0 ? opts.threads : static_cast<int>(cfg.get_int("threads", 4));
    const std::string out_dir =
        !opts.out_dir.empty() ? opts.out_dir : cfg.get_string("out", ".");

    const scalestat::ExperimentReport report =
        scalestat::run_experiment(experiment, cfg, seed, threads);
    scalestat::write_report(out_dir, report);
    std::cout << experiment << ": wrote " << report.results.size() << " result rows to "
              << out_dir << "/" << experiment << ".csv\n";
    return 0;
}

int validate(const CommonOptions& opts) {
    const scalestat::Config cfg = scalestat::Config::load(opts.config_path);
    const std::string experiment = cfg.require_string("experiment");
    scalestat::validate_experiment_config(experiment, cfg);
    std::cout << "config ok: experiment=" << experiment << ", " << cfg.entries().size()
              << " keys\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scalestat: scalable-statistics benchmark harness"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string chosen;
    for (const auto& name : scalestat::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        add_common(sub, opts, true);
        sub->callback([&chosen, name] { chosen = name; });
    }
    CLI::App* val = app.add_subcommand("validate", "dry-run config validation");
    add_common(val, opts, false);
    val->callback([&chosen] { chosen = "validate"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (chosen == "validate") return validate(opts);
        return run(chosen, opts);
    } catch (const scalestat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
}
