#include "doctest.h"

#include "support.hpp"
#include "unhap/evaluation.hpp"

using namespace unhap;

TEST_CASE("grid size and nearest-node projection") {
    const auto marks = MarkModel::builtin("identity-linear");
    EventSequence seq(100.0, 1);
    seq.events[0].push_back({0.504, 0.5, std::nullopt, std::nullopt});
    const auto d = discretize_events(seq, 0.01, marks);
    CHECK(d.G == 10000);
    const auto& slot = d.types[0];
    REQUIRE(slot.size() == 1);
    CHECK(slot.bin[0] == 50);
    CHECK(slot.z(50) == doctest::Approx(0.5));
    CHECK(slot.z.sum() == doctest::Approx(0.5));
}

TEST_CASE("events sharing a node merge into one slot") {
    const auto mm = testing::marks("identity-linear");
    EventSequence seq(20.0, 1);
    seq.events[0].push_back({3.001, 0.3, std::nullopt, std::nullopt});
    seq.events[0].push_back({3.02, 0.4, std::nullopt, std::nullopt});
    seq.events[0].push_back({7.5, 0.9, std::nullopt, std::nullopt});
    const auto d = discretize_events(seq, 0.1, *mm);
    const auto& slot = d.types[0];
    REQUIRE(slot.size() == 2);
    CHECK(d.merged == 1);
    CHECK(slot.z(30) == doctest::Approx(0.7));
    CHECK(slot.members[0] == 2);
    CHECK(slot.slot_of_event == std::vector<std::size_t>{0, 0, 1});
    CHECK(slot.f1(0) == doctest::Approx(mm->f1(0.3) + mm->f1(0.4)));

    ModelParams params(1, make_trunc_gauss(0.8, 0.3, 0.2, 1.0), mm);
    params.mu(0) = 0.3;
    params.mu_tilde(0) = 0.6;
    auto rho = constant_assignment(d, 0.5);
    rho.rho[0](0) = 0.7;
    rho.rho[0](1) = 0.2;
    const double fast = loss_meanfield(params, rho, d);
    const double naive = naive_loss_oracle(params, {{0.7, 0.7, 0.2}}, seq, 0.1);
    CHECK(testing::close_rel(fast, naive, 1e-10));
    CHECK_THROWS_AS(naive_loss_oracle(params, {{0.7, 0.6, 0.2}}, seq, 0.1), ConfigError);
}

TEST_CASE("weighted vectors scale with rho") {
    const auto in = testing::random_instance(4);
    const VectorXd& z = in.dseq.types[0].z;
    CHECK(weighted_vector(in.dseq, constant_assignment(in.dseq, 1.0), 0).isApprox(z));
    CHECK(weighted_vector(in.dseq, constant_assignment(in.dseq, 0.0), 0).isZero());
    CHECK(weighted_vector(in.dseq, constant_assignment(in.dseq, 0.5), 0).isApprox(z / 2));

    MixtureAssignment bad = constant_assignment(in.dseq, 0.5);
    bad.rho[0].conservativeResize(bad.rho[0].size() + 1);
    CHECK_THROWS_AS(weighted_vector(in.dseq, bad, 0), InternalError);
}

TEST_CASE("projection keeps weight and error within half a step") {
    const auto mm = testing::marks("identity-uniform");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto in = testing::random_instance(seed, false, "identity-uniform");
        const auto& slot = in.dseq.types[0];
        double total = 0;
        for (const auto& e : in.seq.events[0]) total += mm->omega(e.kappa);
        CHECK(slot.z.sum() == doctest::Approx(total).epsilon(1e-12));
        const auto& ev = in.seq.events[0];
        for (std::size_t n = 0; n < ev.size(); ++n) {
            const double node = static_cast<double>(slot.bin[slot.slot_of_event[n]]) * in.dseq.step;
            CHECK(std::abs(node - ev[n].t) <= in.dseq.step / 2 + 1e-12);
        }
    }
}

TEST_CASE("grid step must be positive and below the horizon") {
    const auto marks = MarkModel::builtin("identity-uniform");
    EventSequence seq(1.0, 1);
    CHECK_THROWS_AS(discretize_events(seq, 0.0, marks), ConfigError);
    CHECK_THROWS_AS(discretize_events(seq, 2.0, marks), ConfigError);
}

TEST_CASE("hard labels treat one half as noise") {
    const auto in = testing::random_instance(2);
    auto rho = constant_assignment(in.dseq, 0.5);
    for (auto h : rho.hard[0]) CHECK(h == 0);
    rho.rho[0].setConstant(0.51);
    rho.threshold();
    for (auto h : rho.hard[0]) CHECK(h == 1);
}
