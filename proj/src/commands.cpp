#include "unhap/commands.hpp"

#include <fstream>
#include <sstream>

#include "unhap/evaluation.hpp"
#include "unhap/io.hpp"
#include "unhap/simulator.hpp"

namespace unhap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::shared_ptr<const MarkModel> builtin(const std::string& name) {
    return std::make_shared<const MarkModel>(MarkModel::builtin(name));
}

io::Provenance provenance(const RunConfig& cfg) { return {cfg.hash(), cfg.seed}; }

json stamped(json j, const RunConfig& cfg) {
    j["config_sha256"] = cfg.hash();
    j["seed"] = cfg.seed;
    return j;
}

std::string comment_header(const RunConfig& cfg) {
    return "# config_sha256=" + cfg.hash() + "\n# seed=" + std::to_string(cfg.seed) + "\n";
}

const std::string& require(const std::optional<std::string>& v, const char* what) {
    if (!v) throw ConfigError(std::string("missing path: ") + what);
    return *v;
}

std::vector<std::string> finish(const fs::path& out, const RunConfig& cfg, std::vector<std::string> files) {
    io::write_json(out / "config.json", cfg.to_json());
    files.push_back("config.json");
    io::write_manifest(out, files);
    return files;
}

}  // namespace

std::vector<std::string> cmd_simulate(const RunConfig& cfg, const fs::path& out) {
    const auto marks = builtin(cfg.simulation.marks);
    SimConfig sc;
    sc.mu = cfg.simulation.mu;
    sc.mu_tilde = cfg.simulation.mu_tilde;
    sc.T = cfg.simulation.T;
    sc.kernel = cfg.simulation.kernel;
    sc.seed = cfg.seed;
    const EventSequence seq = simulate_mixture(sc, *marks);

    ModelParams truth(1, sc.kernel, marks);
    truth.mu(0) = sc.mu;
    truth.mu_tilde(0) = sc.mu_tilde;

    fs::create_directories(out);
    io::write_events(out / "events.csv", seq, provenance(cfg));
    io::write_json(out / "truth.json", stamped(io::params_to_json(truth), cfg));
    return finish(out, cfg, {"events.csv", "truth.json"});
}

std::vector<std::string> cmd_fit(const RunConfig& cfg, const fs::path& out) {
    const auto marks = builtin(cfg.model.marks);
    const EventSequence seq = io::read_events(require(cfg.paths.events, "paths.events / --events"), std::nullopt,
                                              cfg.solver.mode == FitMode::FadinUnmarked ? nullptr : marks.get());
    const FitResult r = fit(seq, marks, cfg.solver);

    fs::create_directories(out);
    json params = io::params_to_json(r.params);
    params["mode"] = std::string(to_string(cfg.solver.mode));
    params["diagnostics"] = {{"refreshes", r.refreshes},
                             {"halvings", r.halvings},
                             {"merged_events", r.merged_events},
                             {"clamped_events", r.clamped_events},
                             {"moment_fallbacks", r.moment_fallbacks},
                             {"monotone_fraction", r.monotone_fraction},
                             {"n_events", seq.size()}};
    params["initial"] = io::params_to_json(r.initial);
    io::write_json(out / "params.json", stamped(params, cfg));

    std::ostringstream rho;
    rho << comment_header(cfg) << "type_id,time,mark,rho,label_hat\n";
    for (int i = 0; i < seq.D(); ++i) {
        const auto& ev = seq.events[static_cast<std::size_t>(i)];
        for (std::size_t n = 0; n < ev.size(); ++n)
            rho << i << ',' << io::format_double(ev[n].t) << ',' << io::format_double(ev[n].kappa) << ','
                << io::format_double(r.event_rho[static_cast<std::size_t>(i)][n]) << ','
                << r.labels[static_cast<std::size_t>(i)][n] << '\n';
    }
    io::write_text(out / "rho.csv", rho.str());

    std::ostringstream trace;
    trace << comment_header(cfg) << "iteration,loss\n";
    for (std::size_t k = 0; k < r.loss_trace.size(); ++k)
        trace << k << ',' << io::format_double(r.loss_trace[k]) << '\n';
    io::write_text(out / "trace.csv", trace.str());
    return finish(out, cfg, {"params.json", "rho.csv", "trace.csv"});
}

std::vector<std::string> cmd_score(const RunConfig& cfg, const fs::path& out) {
    const fs::path fit_dir = require(cfg.paths.fit, "paths.fit / --fit");
    const json fitted = io::read_json(fit_dir / "params.json");
    const FitMode mode = parse_fit_mode(fitted.value("mode", std::string("unhap")));
    const ModelParams params = io::params_from_json(fitted);

    MetricsReport report;
    if (cfg.paths.events) {
        const EventSequence seq = io::read_events(*cfg.paths.events);
        if (!seq.has_labels()) {
            report.notices.emplace_back("event file has no labels; precision/recall omitted");
        } else {
            std::vector<int> predicted;
            std::ifstream in(fit_dir / "rho.csv");
            std::string line;
            bool header = false;
            while (std::getline(in, line)) {
                if (line.empty() || line.front() == '#') continue;
                if (!header) {
                    header = true;
                    continue;
                }
                predicted.push_back(line.back() == '1' ? 1 : 0);
            }
            std::vector<int> truth;
            for (const auto& type : seq.events)
                for (const auto& e : type) truth.push_back(e.label.value_or(1));
            if (predicted.size() != truth.size())
                throw ConfigError("fit artifacts and event file disagree on the number of events");
            report.counts = confusion(predicted, truth);
        }
    } else {
        report.notices.emplace_back("no event file; precision/recall omitted");
    }

    if (cfg.paths.truth) {
        const ModelParams truth = io::params_from_json(io::read_json(*cfg.paths.truth));
        report.param_error_l2 = param_error(params, truth, cfg.metrics.param_coords);
    } else {
        report.notices.emplace_back("no truth file; param_error omitted");
    }

    if (cfg.paths.test_events) {
        const EventSequence test = io::read_events(*cfg.paths.test_events);
        const NllPolicy policy =
            cfg.metrics.nll_policy.value_or(mode == FitMode::Unhap ? NllPolicy::Mixture : NllPolicy::HawkesOnly);
        report.nll = test_nll(params, policy, test, cfg.solver.step);
        if (report.nll->zero_intensity_events > 0)
            report.notices.push_back(std::to_string(report.nll->zero_intensity_events) +
                                     " test events have zero intensity; nll is inf");
    } else {
        report.notices.emplace_back("no test file; nll omitted");
    }

    fs::create_directories(out);
    io::write_text(out / "metrics.txt", comment_header(cfg) + io::metrics_to_text(report));
    io::write_json(out / "metrics.json", stamped(io::metrics_to_json(report), cfg));
    return finish(out, cfg, {"metrics.txt", "metrics.json"});
}

std::vector<std::string> cmd_experiment(const std::string& name, const ExperimentOptions& opts, const fs::path& out) {
    const ExperimentOutput result = run_experiment(name, opts);
    fs::create_directories(out);
    json meta = {{"experiment", name},
                 {"scale", std::string(to_string(opts.scale))},
                 {"seed", opts.seed},
                 {"reps", opts.reps ? json(*opts.reps) : json("default")},
                 {"n_iter", opts.n_iter ? json(*opts.n_iter) : json("default")}};
    const std::string stamp = io::sha256_hex(meta.dump());
    meta["config_sha256"] = stamp;
    std::vector<std::string> files;
    for (const auto& [file, table] : result.tables) {
        io::write_text(out / file, "# config_sha256=" + stamp + "\n# seed=" + std::to_string(opts.seed) + "\n" +
                                       table.to_csv());
        files.push_back(file);
    }
    io::write_json(out / (name + "_config.json"), meta);
    files.push_back(name + "_config.json");
    // Wall-clock tables vary between runs and stay out of the manifest.
    for (const auto& [file, table] : result.timings) io::write_text(out / file, table.to_csv());
    io::write_manifest(out, files);
    return files;
}

}  // namespace unhap
