#include "doctest.h"

#include <algorithm>

#include "support.hpp"
#include "unhap/evaluation.hpp"
#include "unhap/simulator.hpp"
#include "unhap/solver.hpp"

using namespace unhap;

namespace {

SolverConfig quick(int n_iter, int b) {
    SolverConfig cfg;
    cfg.n_iter = n_iter;
    cfg.b = b;
    cfg.init.scheme = InitScheme::MomentsMean;
    cfg.init.window = DelayWindow::Relative;
    return cfg;
}

EventSequence sample(std::uint64_t seed, double T, double mu_tilde, const MarkModel& marks) {
    SimConfig sim;
    sim.T = T;
    sim.mu_tilde = mu_tilde;
    sim.seed = seed;
    return simulate_mixture(sim, marks);
}

}  // namespace

TEST_CASE("refresh count is floor(n_iter / b)") {
    const auto mm = testing::marks("identity-linear");
    const auto seq = sample(1, 100, 0.5, *mm);
    for (auto [n, b] : {std::pair{300, 7}, std::pair{100, 100}, std::pair{250, 50}}) {
        const auto r = fit(seq, mm, quick(n, b));
        CHECK(r.refreshes == static_cast<std::size_t>(n / b));
        CHECK(r.loss_trace.size() == static_cast<std::size_t>(n));
    }
    auto cfg = quick(300, 7);
    cfg.mode = FitMode::JointFadin;
    CHECK(fit(seq, mm, cfg).refreshes == 1);
}

TEST_CASE("fits are deterministic") {
    const auto mm = testing::marks("identity-linear");
    const auto seq = sample(2, 100, 0.5, *mm);
    auto cfg = quick(400, 50);
    cfg.init.rho_init = RhoInit::Bernoulli;
    const auto a = fit(seq, mm, cfg);
    const auto b = fit(seq, mm, cfg);
    CHECK(a.params.mu(0) == b.params.mu(0));
    CHECK(a.params.mu_tilde(0) == b.params.mu_tilde(0));
    CHECK(to_vector(a.params.kernels[0]) == to_vector(b.params.kernels[0]));
    CHECK(a.event_rho == b.event_rho);
    CHECK(a.loss_trace == b.loss_trace);
}

TEST_CASE("a single event fits without error") {
    const auto mm = testing::marks("identity-linear");
    EventSequence seq(20.0, 1);
    seq.events[0].push_back({4.2, 0.6, std::nullopt, std::nullopt});
    for (auto mode : {FitMode::Unhap, FitMode::JointFadin, FitMode::FadinUnmarked}) {
        auto cfg = quick(400, 50);
        cfg.mode = mode;
        const auto r = fit(seq, mm, cfg);
        CHECK(r.params.all_finite());
        CHECK(r.labels[0].size() == 1);
    }
}

TEST_CASE("degenerate inputs are rejected") {
    const auto mm = testing::marks("identity-linear");
    CHECK_THROWS_WITH_AS(fit(EventSequence(20.0, 1), mm, quick(100, 10)), "no events", ConfigError);
    EventSequence short_seq(0.5, 1);
    short_seq.events[0].push_back({0.2, 0.5, std::nullopt, std::nullopt});
    CHECK_THROWS_AS(fit(short_seq, mm, quick(100, 10)), ConfigError);
    CHECK_THROWS_AS(quick(100, 200).validate(), ConfigError);
    CHECK_THROWS_AS(parse_fit_mode("fadin"), ConfigError);
}

TEST_CASE("baseline modes keep every event structured") {
    const auto mm = testing::marks("identity-linear");
    const auto seq = sample(3, 100, 0.5, *mm);
    auto cfg = quick(200, 20);
    cfg.mode = FitMode::JointFadin;
    const auto r = fit(seq, mm, cfg);
    CHECK(r.params.mu_tilde(0) == 0.0);
    for (double v : r.event_rho[0]) CHECK(v == 1.0);
    const auto labels = predict_labels(r);
    for (int l : labels[0]) CHECK(l == 1);
}

TEST_CASE("predicted labels use a strict threshold") {
    FitResult r;
    r.event_rho = {{0.5, 0.51, 0.49, 1.0, 0.0}};
    CHECK(predict_labels(r)[0] == std::vector<int>{0, 1, 0, 1, 0});
}

TEST_CASE("loss trace decreases within blocks") {
    const auto mm = testing::marks("identity-linear");
    const auto seq = sample(4, 200, 0.5, *mm);
    const auto r = fit(seq, mm, quick(1000, 100));
    CHECK(r.halvings == 0);
    CHECK(r.monotone_fraction > 0.95);
    CHECK(r.loss_trace.back() < r.loss_trace.front());
}

TEST_CASE("pure Hawkes data is recovered") {
    const auto mm = testing::marks("identity-linear");
    SimConfig sim;
    sim.mu_tilde = 0.0;
    sim.T = 1000;
    ModelParams truth(1, sim.kernel, mm);
    truth.mu(0) = sim.mu;
    std::vector<double> errors;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        sim.seed = 1000 + seed;
        const auto r = fit(simulate_mixture(sim, *mm), mm, quick(10000, 200));
        errors.push_back(param_error(r.params, truth));
    }
    std::nth_element(errors.begin(), errors.begin() + 5, errors.end());
    const double upper = errors[5];
    std::nth_element(errors.begin(), errors.begin() + 4, errors.end());
    const double median = 0.5 * (errors[4] + upper);
    MESSAGE("median error " << median);
    CHECK(median <= 0.3);
}
