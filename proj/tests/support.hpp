#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "unhap/estimator.hpp"
#include "unhap/grid.hpp"
#include "unhap/mark_model.hpp"
#include "unhap/model.hpp"

namespace testing {

using namespace unhap;

inline std::shared_ptr<const MarkModel> marks(const std::string& name) {
    return std::make_shared<const MarkModel>(MarkModel::builtin(name));
}

/// Small random problem: D = 1, T = 20, step 0.1, W = 1, at most 30 events.
struct Instance {
    EventSequence seq;
    ModelParams params;
    DiscretizedSequence dseq;
    MixtureAssignment rho;
};

inline KernelParams random_kernel(std::mt19937_64& rng, KernelFamily family) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (family == KernelFamily::TruncatedGaussian)
        return make_trunc_gauss(0.1 + 1.4 * u01(rng), 0.1 + 0.8 * u01(rng), 0.05 + 0.4 * u01(rng), 1.0);
    const double s = 0.05 + 0.2 * u01(rng);
    const double u = 0.05 + (1.0 - 2 * s - 0.1) * u01(rng);
    return make_raised_cosine(0.1 + 1.4 * u01(rng), u, s, 1.0);
}

/// `binary` draws rho in {0, 1}; otherwise rho ~ U(0.05, 0.95).
inline Instance random_instance(std::uint64_t seed, bool binary = false, const std::string& mark_name = "identity-linear") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const auto mm = marks(mark_name);
    const KernelFamily family = seed % 2 == 0 ? KernelFamily::TruncatedGaussian : KernelFamily::RaisedCosine;

    Instance in;
    in.seq = EventSequence(20.0, 1);
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int k = 0; k < n; ++k) {
        MarkedEvent e;
        e.t = 20.0 * u01(rng);
        e.kappa = mm->is_unmarked() ? 1.0 : u01(rng);
        in.seq.events[0].push_back(e);
    }
    in.seq.sort_and_separate();

    in.params = ModelParams(1, random_kernel(rng, family), mm);
    in.params.mu(0) = 0.05 + u01(rng);
    in.params.mu_tilde(0) = 0.05 + u01(rng);

    in.dseq = discretize_events(in.seq, 0.1, *mm);
    in.rho = constant_assignment(in.dseq, 0.5);
    for (auto& r : in.rho.rho)
        for (Eigen::Index s = 0; s < r.size(); ++s)
            r(s) = binary ? static_cast<double>(rng() % 2) : 0.05 + 0.9 * u01(rng);
    in.rho.threshold();
    return in;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

/// Central difference of f at x with step h.
template <typename F>
double central_diff(F&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace testing
