#include "unhap/simulator.hpp"

#include <algorithm>
#include <deque>

namespace unhap {

namespace {

constexpr int kBoundGrid = 4096;
constexpr double kBoundSafety = 1.001;

}  // namespace

double branching_ratio(const KernelParams& kernel, const MarkModel& marks) {
    return integral(kernel) * marks.expected_omega(Source::Structured);
}

OffspringSampler::OffspringSampler(const KernelParams& kernel)
    : shape_(unit_amplitude(kernel)), W_(support_length(kernel)) {
    const DiscreteKernel grid = discretize(shape_, W_ / kBoundGrid);
    bound_ = grid.values.maxCoeff() * kBoundSafety;
}

std::vector<double> OffspringSampler::children(double parent_time, double rate_scale,
                                               std::mt19937_64& rng) const {
    std::vector<double> out;
    if (!(rate_scale > 0.0)) return out;
    const double majorant = rate_scale * bound_;
    std::poisson_distribution<long> count(majorant * W_);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const long candidates = count(rng);
    for (long c = 0; c < candidates; ++c) {
        // (0, W]: 1 - U lies in (0, 1]
        const double lag = W_ * (1.0 - unif(rng));
        const double accept = rate_scale * evaluate(shape_, lag) / majorant;
        if (unif(rng) < accept) out.push_back(parent_time + lag);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> simulate_child_times(const MarkedEvent& parent, double rate_scale,
                                         const KernelParams& kernel, std::mt19937_64& rng) {
    if (!(rate_scale > 0.0)) return {};
    return OffspringSampler(kernel).children(parent.t, rate_scale, rng);
}

EventSequence simulate_mixture(const SimConfig& config, const MarkModel& marks) {
    validate(config.kernel);
    if (!(config.T > 0)) throw ConfigError("simulation horizon T must be > 0");
    if (config.mu < 0 || config.mu_tilde < 0) throw ConfigError("baselines must be >= 0");
    const double ratio = branching_ratio(config.kernel, marks);
    if (ratio >= 1.0)
        throw ConfigError("unstable configuration: branching ratio " + std::to_string(ratio) + " >= 1");

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    EventSequence seq(config.T, 1);
    auto& out = seq.events[0];

    std::poisson_distribution<long> immigrants(config.mu * config.T);
    const long n_imm = config.mu > 0 ? immigrants(rng) : 0;
    std::deque<MarkedEvent> pending;
    for (long k = 0; k < n_imm; ++k) {
        MarkedEvent e;
        e.t = config.T * unif(rng);
        e.kappa = marks.sample(Source::Structured, rng);
        e.label = 1;
        e.gen = 0;
        pending.push_back(e);
    }

    const double alpha = amplitude(config.kernel);
    const OffspringSampler sampler(config.kernel);
    while (!pending.empty()) {
        MarkedEvent parent = pending.front();
        pending.pop_front();
        for (double t : sampler.children(parent.t, alpha * marks.omega(parent.kappa), rng)) {
            if (t > config.T) break;
            MarkedEvent child;
            child.t = t;
            child.kappa = marks.sample(Source::Structured, rng);
            child.label = 1;
            child.gen = *parent.gen + 1;
            pending.push_back(child);
        }
        out.push_back(parent);
    }

    std::poisson_distribution<long> noise(config.mu_tilde * config.T);
    const long n_noise = config.mu_tilde > 0 ? noise(rng) : 0;
    for (long k = 0; k < n_noise; ++k) {
        MarkedEvent e;
        e.t = config.T * unif(rng);
        e.kappa = marks.sample(Source::Noise, rng);
        e.label = 0;
        out.push_back(e);
    }

    seq.sort_and_separate();
    return seq;
}

}  // namespace unhap
