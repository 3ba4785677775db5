// One PASS/FAIL line per acceptance criterion.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "unhap/commands.hpp"
#include "unhap/evaluation.hpp"
#include "unhap/init.hpp"
#include "unhap/io.hpp"
#include "unhap/simulator.hpp"
#include "unhap/solver.hpp"

using namespace unhap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void run(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("criterion %d %s: %s (%s; %.1fs)\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(5);
    s << v;
    return s.str();
}

double cell(const Table& t, const std::vector<std::pair<std::string, std::string>>& where, const std::string& col) {
    const auto rows = t.select(where);
    if (rows.size() != 1) throw std::runtime_error("expected one row for column " + col);
    return std::stod((*rows.front())[t.column(col)]);
}

ExperimentOutput experiment(const std::string& name) {
    ExperimentOptions opts;
    opts.scale = Scale::Desk;
    auto out = run_experiment(name, opts);
    for (const auto& [file, table] : out.tables) io::write_text(fs::path("acceptance_out") / file, table.to_csv());
    for (const auto& [file, table] : out.timings) io::write_text(fs::path("acceptance_out") / file, table.to_csv());
    return out;
}

Outcome gradients() {
    int checked = 0;
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto in = testing::random_instance(5000 + seed);
        const auto pre = precompute(in.dseq, in.rho, kernel_grid_size(in.params, in.dseq));
        const auto g_mu = grad_mu(in.params, in.rho, pre);
        const auto g_mut = grad_mu_tilde(in.params, in.rho, pre);
        const auto g_eta = grad_eta(in.params, in.rho, pre);
        const auto g_rho = grad_rho(in.params, in.rho, in.dseq);

        auto check = [&](double analytic, const std::function<double(double)>& f, double x) {
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            const double fd = testing::central_diff(f, x, h);
            const double err = std::abs(analytic - fd) / std::max(1e-8, std::max(std::abs(analytic), std::abs(fd)));
            worst = std::max(worst, std::abs(analytic - fd) <= 1e-8 ? 0.0 : err);
            ++checked;
            return testing::close_rel(analytic, fd, 1e-4, 1e-8);
        };
        auto with = [&](auto&& edit) {
            return [&, edit](double x) {
                auto p = in.params;
                edit(p, x);
                return loss_meanfield(p, in.rho, in.dseq);
            };
        };
        bool ok = check(g_mu(0), with([](ModelParams& p, double x) { p.mu(0) = x; }), in.params.mu(0));
        ok &= check(g_mut(0), with([](ModelParams& p, double x) { p.mu_tilde(0) = x; }), in.params.mu_tilde(0));
        const KernelVector v = to_vector(in.params.kernels[0]);
        for (int k = 0; k < 3; ++k)
            ok &= check(g_eta[0](k),
                        with([k, v](ModelParams& p, double x) {
                            KernelVector w = v;
                            w(k) = x;
                            p.kernels[0] = with_vector(p.kernels[0], w);
                        }),
                        v(k));
        for (Eigen::Index s = 0; s < in.rho.rho[0].size(); ++s)
            ok &= check(
                g_rho[0](s),
                [&](double x) {
                    auto r = in.rho;
                    r.rho[0](s) = x;
                    return loss_meanfield(in.params, r, in.dseq);
                },
                in.rho.rho[0](s));
        if (!ok) return {false, "instance " + std::to_string(seed) + " mismatch, worst rel " + fmt(worst)};
    }
    return {true, std::to_string(checked) + " gradients, worst rel " + fmt(worst)};
}

Outcome oracle() {
    double worst = 0;
    int binary_cases = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const bool binary = seed % 4 == 0;
        binary_cases += binary;
        const auto in = testing::random_instance(9000 + seed, binary);
        const double step = in.dseq.step;

        const double naive_mf = naive_loss_oracle(in.params, event_rho(in.dseq, in.rho), in.seq, step);
        const double mf = loss_meanfield(in.params, in.rho, in.dseq);

        const auto hard = in.rho.hardened();
        const double naive_hard = naive_loss_oracle(in.params, event_rho(in.dseq, hard), in.seq, step);
        const double hl = loss_hard(in.params, in.rho, in.dseq);

        auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
        worst = std::max({worst, rel(mf, naive_mf), rel(hl, naive_hard)});
        if (binary) {
            const auto pre = precompute(in.dseq, in.rho, kernel_grid_size(in.params, in.dseq));
            if (pre.xi.cwiseAbs().maxCoeff() != 0.0) return {false, "xi nonzero for binary rho"};
            worst = std::max(worst, rel(hl, naive_mf));
        }
    }
    return {worst <= 1e-8, "100 instances (" + std::to_string(binary_cases) + " binary), worst rel " + fmt(worst)};
}

Outcome simulator_moments() {
    const auto linear = MarkModel::builtin("identity-linear");
    SimConfig cfg;
    cfg.mu = 0.4;
    cfg.mu_tilde = 0.0;
    cfg.T = 1000;
    cfg.kernel = make_trunc_gauss(0.75, 0.5, 0.1, 1.0);
    const double expected = cfg.mu * cfg.T / (1.0 - 0.75 * linear.expected_omega(Source::Structured));
    double total = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        cfg.seed = 70000 + s;
        total += static_cast<double>(simulate_mixture(cfg, linear).size());
    }
    const double hawkes = total / 200;

    cfg.mu = 0.0;
    cfg.mu_tilde = 0.5;
    total = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        cfg.seed = 80000 + s;
        total += static_cast<double>(simulate_mixture(cfg, linear).size());
    }
    const double noise = total / 200;
    const bool ok = std::abs(hawkes - expected) <= 0.05 * expected && std::abs(noise - 500.0) <= 0.05 * 500.0;
    return {ok, "hawkes mean " + fmt(hawkes) + " vs " + fmt(expected) + ", noise mean " + fmt(noise) + " vs 500"};
}

Outcome fig2() {
    const auto out = experiment("fig2");
    const Table& t = out.tables.at("fig2.csv");
    bool ok = true;
    std::string detail;
    for (const std::string setting : {"linear", "uniform"}) {
        for (const std::string mt : {"0.1", "0.5", "1", "1.5"}) {
            const double u = cell(t, {{"mu_tilde", mt}, {"setting", setting}, {"method", "unhap"}}, "median_error");
            const double j = cell(t, {{"mu_tilde", mt}, {"setting", setting}, {"method", "jointfadin"}}, "median_error");
            if (!(u < j)) {
                ok = false;
                detail += setting + " mu_tilde=" + mt + " unhap " + fmt(u) + " >= jointfadin " + fmt(j) + "; ";
            }
        }
        const double lo = cell(t, {{"mu_tilde", "0.1"}, {"setting", setting}, {"method", "unhap"}}, "median_error");
        const double hi = cell(t, {{"mu_tilde", "1.5"}, {"setting", setting}, {"method", "unhap"}}, "median_error");
        detail += setting + " robustness ratio " + fmt(hi / lo) + "; ";
        if (!(hi <= 2 * lo)) ok = false;
    }
    return {ok, detail.empty() ? "all cells" : detail.substr(0, detail.size() - 2)};
}

Outcome fig3() {
    const auto out = experiment("fig3");
    const Table& t = out.tables.at("fig3.csv");
    auto get = [&](const std::string& alpha, const std::string& setting, const std::string& col) {
        return cell(t, {{"alpha", alpha}, {"mu_tilde", "0.1"}, {"setting", setting}, {"method", "unhap"}}, col);
    };
    bool ok = true;
    std::string detail;
    for (const std::string setting : {"linear", "uniform"}) {
        const double p = get("0.9", setting, "median_precision"), r = get("0.9", setting, "median_recall");
        ok &= p >= 0.9 && r >= 0.9;
        detail += "alpha=0.9 " + setting + " P " + fmt(p) + " R " + fmt(r) + "; ";
    }
    const double pl = get("0.1", "linear", "median_precision"), pu = get("0.1", "uniform", "median_precision");
    ok &= pl > pu;
    detail += "alpha=0.1 precision linear " + fmt(pl) + " vs uniform " + fmt(pu);
    return {ok, detail};
}

Outcome table1() {
    const auto out = experiment("table1-marked");
    const Table& t = out.tables.at("table1-marked.csv");
    bool ok = true;
    std::string detail;
    for (const std::string T : {"100", "500", "1000"}) {
        const double u = cell(t, {{"T", T}, {"method", "unhap"}}, "median_nll");
        const double j = cell(t, {{"T", T}, {"method", "jointfadin"}}, "median_nll");
        ok &= u < j;
        detail += "T=" + T + " " + fmt(u) + " vs " + fmt(j) + "; ";
    }
    return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome init_study() {
    const auto out = experiment("init-study");
    const Table& t = out.tables.at("init-study.csv");
    bool ok = true;
    std::string detail;
    for (const std::string setting : {"linear", "uniform"}) {
        auto get = [&](const std::string& kernel, const std::string& method) {
            return cell(t, {{"kernel", kernel}, {"setting", setting}, {"T", "1000"}, {"method", method}}, "median_error");
        };
        const double rc_mm = get("raised_cosine", "moments-mean"), rc_rand = get("raised_cosine", "random");
        const double tg_mm = get("truncated_gaussian", "moments-mean"), tg_rand = get("truncated_gaussian", "random");
        ok &= rc_mm <= rc_rand && tg_mm <= 1.5 * tg_rand;
        detail += setting + " RC " + fmt(rc_mm) + " vs " + fmt(rc_rand) + ", TG " + fmt(tg_mm) + " vs " + fmt(tg_rand) + "; ";
    }
    return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome moment_identity() {
    double worst = 0;
    int sequences = 0;
    for (const std::string name : {"identity-linear", "identity-uniform", "identity-smallmark"}) {
        const auto mm = testing::marks(name);
        for (std::uint64_t s = 0; s < 5; ++s) {
            SimConfig cfg;
            cfg.T = 500;
            cfg.seed = 300 + s;
            const auto seq = simulate_mixture(cfg, *mm);
            double omega = 0;
            for (const auto& e : seq.events[0]) omega += mm->omega(e.kappa);
            const double half = static_cast<double>(seq.size()) / 2;
            for (auto family : {KernelFamily::TruncatedGaussian, KernelFamily::RaisedCosine})
                for (auto scheme : {InitScheme::MomentsMax, InitScheme::MomentsMean}) {
                    const auto p = moment_match(seq, family, 1.0, mm, scheme);
                    worst = std::max(worst, std::abs(p.mu_tilde(0) * cfg.T - half) / half);
                    worst = std::max(worst, std::abs(p.mu(0) * cfg.T + amplitude(p.kernels[0]) * omega - half) / half);
                    ++sequences;
                }
        }
    }
    return {worst <= 1e-12, std::to_string(sequences) + " fits, worst rel " + fmt(worst)};
}

Outcome determinism() {
    const fs::path root = "acceptance_determinism";
    const std::vector<std::string> files = {"sim/events.csv", "sim/truth.json",   "sim/manifest.txt",
                                            "fit/params.json", "fit/rho.csv",      "fit/trace.csv",
                                            "fit/manifest.txt", "score/metrics.txt", "score/metrics.json",
                                            "score/manifest.txt"};
    std::vector<std::string> first;
    for (int pass = 0; pass < 2; ++pass) {
        fs::remove_all(root);
        RunConfig cfg;
        cfg.seed = 2024;
        cfg.paths.events = (root / "sim" / "events.csv").string();
        cfg.paths.truth = (root / "sim" / "truth.json").string();
        cfg.paths.fit = (root / "fit").string();
        cmd_simulate(cfg, root / "sim");
        cmd_fit(cfg, root / "fit");
        cmd_score(cfg, root / "score");
        for (std::size_t k = 0; k < files.size(); ++k) {
            const auto text = io::read_text(root / files[k]);
            if (pass == 0) first.push_back(text);
            else if (text != first[k]) return {false, files[k] + " differs"};
        }
    }
    return {true, std::to_string(files.size()) + " artifacts byte-identical"};
}

Outcome refreshes() {
    const auto mm = testing::marks("identity-linear");
    SimConfig sim;
    sim.T = 1000;
    sim.seed = 55;
    const auto seq = simulate_mixture(sim, *mm);
    std::string detail;
    bool ok = true;
    for (auto [n, b] : {std::pair{10000, 200}, std::pair{1000, 10}}) {
        SolverConfig cfg;
        cfg.n_iter = n;
        cfg.b = b;
        const auto r = fit(seq, mm, cfg);
        ok &= r.refreshes == static_cast<std::size_t>(n / b);
        detail += "(" + std::to_string(n) + "," + std::to_string(b) + ") -> " + std::to_string(r.refreshes) + "; ";
    }
    return {ok, detail.substr(0, detail.size() - 2)};
}

}  // namespace

int main() {
    run(1, "gradients vs central differences", gradients);
    run(2, "losses vs brute-force oracle", oracle);
    run(3, "simulator event counts", simulator_moments);
    run(4, "parameter error, unhap vs jointfadin", fig2);
    run(5, "label precision and recall", fig3);
    run(6, "held-out NLL, unhap vs jointfadin", table1);
    run(7, "moment matching vs random init", init_study);
    run(8, "moment-matching count identity", moment_identity);
    run(9, "byte-identical reruns", determinism);
    run(10, "precomputation refresh count", refreshes);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
