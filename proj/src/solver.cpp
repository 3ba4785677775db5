#include "unhap/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "unhap/grid.hpp"

namespace unhap {

FitMode parse_fit_mode(std::string_view name) {
    if (name == "unhap") return FitMode::Unhap;
    if (name == "jointfadin") return FitMode::JointFadin;
    if (name == "fadin-unmarked") return FitMode::FadinUnmarked;
    throw ConfigError("unknown fit mode '" + std::string(name) + "'");
}

std::string_view to_string(FitMode mode) {
    switch (mode) {
        case FitMode::Unhap: return "unhap";
        case FitMode::JointFadin: return "jointfadin";
        case FitMode::FadinUnmarked: return "fadin-unmarked";
    }
    return "?";
}

void SolverConfig::validate() const {
    if (n_iter < 1) throw ConfigError("n_iter must be >= 1");
    if (b < 1 || b > n_iter) throw ConfigError("b must satisfy 1 <= b <= n_iter");
    if (!(step > 0)) throw ConfigError("grid step must be > 0");
    if (!(W > 0)) throw ConfigError("kernel support W must be > 0");
    if (step > W) throw ConfigError("grid step must not exceed W");
    if (!(step_theta > 0) || !(step_shape > 0) || !(step_rho > 0)) throw ConfigError("step sizes must be > 0");
    if (!(shape_trust > 0)) throw ConfigError("shape_trust must be > 0");
    if (e_inner_steps < 1) throw ConfigError("e_inner_steps must be >= 1");
    if (max_halvings < 0) throw ConfigError("max_halvings must be >= 0");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

class ThetaStepper {
public:
    ThetaStepper(const SolverConfig& cfg, bool fit_noise) : cfg_(cfg), fit_noise_(fit_noise) {}

    // Runs `count` projected steps from `params`, appending the loss before each.
    void run(ModelParams& params, const Precomputations& pre, LossKind kind, int count, std::vector<double>& trace,
             std::size_t& non_increasing, int& halvings) {
        ModelParams previous = params;
        double last = std::numeric_limits<double>::quiet_NaN();
        for (int s = 0; s < count; ++s) {
            LossEvaluation eval = evaluate_theta(params, pre, kind, true);
            while (!std::isfinite(eval.value) || !params.all_finite() || !finite(eval.grad)) {
                if (halvings >= cfg_.max_halvings)
                    throw std::runtime_error("fit diverged: loss is not finite after " +
                                             std::to_string(halvings) + " step halvings");
                ++halvings;
                scale_ *= 0.5;
                params = previous;
                eval = evaluate_theta(params, pre, kind, true);
            }
            if (s > 0 && eval.value <= last + 1e-12 * std::abs(last)) ++non_increasing;
            last = eval.value;
            trace.push_back(eval.value);
            previous = params;
            apply(params, eval.grad, theta_curvature(params, pre, kind));
        }
    }

private:
    static bool finite(const ThetaGradient& g) {
        if (!g.mu.allFinite() || !g.mu_tilde.allFinite()) return false;
        return std::all_of(g.eta.begin(), g.eta.end(), [](const KernelVector& v) { return v.allFinite(); });
    }

    static double newton(double g, double h) { return h > 1e-300 ? g / h : 0.0; }

    void apply(ModelParams& params, const ThetaGradient& g, const ThetaGradient& h) const {
        const double st = cfg_.step_theta * scale_;
        const double ss = cfg_.step_shape * scale_;
        const double trust = cfg_.shape_trust * params.W();
        for (int i = 0; i < params.D(); ++i) {
            params.mu(i) -= st * newton(g.mu(i), h.mu(i));
            if (fit_noise_) params.mu_tilde(i) -= st * newton(g.mu_tilde(i), h.mu_tilde(i));
        }
        for (std::size_t k = 0; k < params.kernels.size(); ++k) {
            KernelVector v = to_vector(params.kernels[k]);
            v(0) -= st * newton(g.eta[k](0), h.eta[k](0));
            for (int p = 1; p < 3; ++p) v(p) -= std::clamp(ss * newton(g.eta[k](p), h.eta[k](p)), -trust, trust);
            params.kernels[k] = with_vector(params.kernels[k], v);
        }
        params.project();
    }

    const SolverConfig& cfg_;
    bool fit_noise_;
    double scale_{1.0};
};

}  // namespace

FitResult fit(const EventSequence& seq, std::shared_ptr<const MarkModel> marks, const SolverConfig& cfg) {
    cfg.validate();
    if (seq.empty()) throw ConfigError("no events");
    const bool mixture = cfg.mode == FitMode::Unhap;
    if (cfg.mode == FitMode::FadinUnmarked) marks = std::make_shared<const MarkModel>(MarkModel::unmarked());
    if (!marks) throw ConfigError("a mark model is required");

    FitResult result;
    auto t0 = Clock::now();
    const DiscretizedSequence dseq = discretize_events(seq, cfg.step, *marks);
    result.merged_events = dseq.merged;
    result.clamped_events = dseq.clamped;
    const auto L = static_cast<Eigen::Index>(grid_count(cfg.W, cfg.step));
    if (L > dseq.G) throw ConfigError("kernel support W must not exceed the horizon T");

    ModelParams params;
    if (cfg.init.scheme == InitScheme::Random) {
        params = random_init(seq.D(), cfg.family, cfg.W, marks, cfg.init.seed);
    } else {
        MomentReport report;
        params = moment_match(seq, cfg.family, cfg.W, marks, cfg.init.scheme, cfg.init.window, &report);
        result.moment_fallbacks = report.fallbacks;
        if (!mixture) {
            // Every event is structured: the matched half-share becomes the full count.
            params.mu *= 2.0;
            for (auto& k : params.kernels) {
                KernelVector v = to_vector(k);
                v(0) *= 2.0;
                k = with_vector(k, v);
            }
        }
    }
    if (!mixture) params.mu_tilde.setZero();
    result.initial = params;

    MixtureAssignment rho = constant_assignment(dseq, mixture ? 0.5 : 1.0);
    if (mixture && cfg.init.rho_init == RhoInit::Bernoulli) {
        std::mt19937_64 rng(cfg.init.seed + 1);
        std::bernoulli_distribution coin(0.5);
        for (auto& r : rho.rho)
            for (Eigen::Index n = 0; n < r.size(); ++n) r(n) = coin(rng) ? 1.0 : 0.0;
        rho.threshold();
    }
    result.timing.init_s = seconds_since(t0);

    ThetaStepper stepper(cfg, mixture);
    std::size_t non_increasing = 0;
    std::size_t comparisons = 0;
    result.loss_trace.reserve(static_cast<std::size_t>(cfg.n_iter));

    if (!mixture) {
        t0 = Clock::now();
        const Precomputations pre = precompute(dseq, rho, L);
        result.refreshes = 1;
        result.timing.precompute_s += seconds_since(t0);
        t0 = Clock::now();
        stepper.run(params, pre, LossKind::Hard, cfg.n_iter, result.loss_trace, non_increasing, result.halvings);
        comparisons += static_cast<std::size_t>(cfg.n_iter - 1);
        result.timing.theta_s += seconds_since(t0);
    } else {
        const int blocks = cfg.n_iter / cfg.b;
        const int remainder = cfg.n_iter % cfg.b;
        for (int block = 0; block < blocks; ++block) {
            t0 = Clock::now();
            for (int e = 0; e < cfg.e_inner_steps; ++e) {
                const auto g = grad_rho(params, rho, dseq);
                for (std::size_t j = 0; j < g.size(); ++j) rho.rho[j] -= cfg.step_rho * g[j];
                rho.project();
            }
            rho.threshold();
            result.timing.rho_s += seconds_since(t0);

            t0 = Clock::now();
            const Precomputations pre = precompute(dseq, rho.hardened(), L);
            ++result.refreshes;
            result.timing.precompute_s += seconds_since(t0);

            t0 = Clock::now();
            const int count = cfg.b + (block == blocks - 1 ? remainder : 0);
            stepper.run(params, pre, LossKind::Hard, count, result.loss_trace, non_increasing, result.halvings);
            comparisons += static_cast<std::size_t>(count - 1);
            result.timing.theta_s += seconds_since(t0);
        }
    }

    result.monotone_fraction =
        comparisons == 0 ? 1.0 : static_cast<double>(non_increasing) / static_cast<double>(comparisons);
    rho.threshold();
    result.labels = event_labels(dseq, rho);
    result.event_rho = event_rho(dseq, rho);
    result.rho = std::move(rho);
    result.params = std::move(params);
    return result;
}

std::vector<std::vector<int>> predict_labels(const FitResult& result) {
    std::vector<std::vector<int>> out;
    for (const auto& r : result.event_rho) {
        auto& row = out.emplace_back();
        for (double v : r) row.push_back(v > 0.5 ? 1 : 0);
    }
    return out;
}

}  // namespace unhap
