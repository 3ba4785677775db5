#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "unhap/commands.hpp"

namespace {

struct Common {
    std::string config;
    std::string out{"out"};
    std::optional<std::uint64_t> seed;
    std::string scale{"desk"};
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
    auto* opt = cmd->add_option("--config", c.config, "JSON run configuration");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    else opt->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", c.seed, "global seed (overrides the config)");
    cmd->add_option("--scale", c.scale, "experiment scale")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->capture_default_str();
}

unhap::RunConfig load(const Common& c) {
    unhap::RunConfig cfg = c.config.empty() ? unhap::RunConfig{} : unhap::RunConfig::load(c.config);
    if (c.seed) cfg.override_seed(*c.seed);
    return cfg;
}

void print(const std::vector<std::string>& files, const std::string& out) {
    for (const auto& f : files) std::cout << out << "/" << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fit and simulate marked Hawkes processes mixed with Poisson noise"};
    app.require_subcommand(1);

    Common sim_opts, fit_opts, score_opts, exp_opts;
    std::optional<std::string> events, truth, fit_dir, test_events;

    auto* sim = app.add_subcommand("simulate", "simulate a labelled event sequence");
    add_common(sim, sim_opts, false);

    auto* fitc = app.add_subcommand("fit", "fit the model to an event file");
    add_common(fitc, fit_opts, false);
    fitc->add_option("--events", events, "event CSV (overrides paths.events)");

    auto* score = app.add_subcommand("score", "compute metrics for a fit");
    add_common(score, score_opts, false);
    score->add_option("--fit", fit_dir, "directory written by `fit`");
    score->add_option("--events", events, "labelled training events");
    score->add_option("--truth", truth, "truth.json written by `simulate`");
    score->add_option("--test", test_events, "held-out event CSV for the NLL");

    std::string experiment;
    std::optional<int> reps, n_iter;
    unsigned workers = 0;
    auto* exp = app.add_subcommand("experiment", "run a named experiment sweep");
    add_common(exp, exp_opts, false);
    exp->add_option("name", experiment, "experiment name")
        ->required()
        ->check(CLI::IsMember(unhap::experiment_names()));
    exp->add_option("--reps", reps, "repetitions per cell (default by scale)");
    exp->add_option("--n-iter", n_iter, "theta steps per fit (default 10000)");
    exp->add_option("--workers", workers, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            print(unhap::cmd_simulate(load(sim_opts), sim_opts.out), sim_opts.out);
        } else if (*fitc) {
            auto cfg = load(fit_opts);
            if (events) cfg.paths.events = events;
            print(unhap::cmd_fit(cfg, fit_opts.out), fit_opts.out);
        } else if (*score) {
            auto cfg = load(score_opts);
            if (fit_dir) cfg.paths.fit = fit_dir;
            if (events) cfg.paths.events = events;
            if (truth) cfg.paths.truth = truth;
            if (test_events) cfg.paths.test_events = test_events;
            print(unhap::cmd_score(cfg, score_opts.out), score_opts.out);
        } else if (*exp) {
            if (!exp_opts.config.empty()) throw unhap::ConfigError("experiments are configured by name and --scale");
            unhap::ExperimentOptions opts;
            opts.scale = unhap::parse_scale(exp_opts.scale);
            opts.seed = exp_opts.seed.value_or(0);
            opts.workers = workers;
            opts.reps = reps;
            opts.n_iter = n_iter;
            opts.progress = [](const std::string& msg) { std::cerr << msg << "\n"; };
            print(unhap::cmd_experiment(experiment, opts, exp_opts.out), exp_opts.out);
        }
    } catch (const unhap::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const unhap::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
