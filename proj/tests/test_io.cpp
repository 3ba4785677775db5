#include "doctest.h"

#include <filesystem>
#include <random>

#include "support.hpp"
#include "unhap/config.hpp"
#include "unhap/io.hpp"
#include "unhap/simulator.hpp"

using namespace unhap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("unhap_test_" + name + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("doubles survive text formatting") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
        CHECK(std::stod(io::format_double(x)) == x);
    }
}

TEST_CASE("event files round-trip") {
    const auto dir = scratch("events");
    const auto marks = MarkModel::builtin("identity-linear");
    SimConfig sim;
    sim.T = 50;
    sim.seed = 12;
    const auto seq = simulate_mixture(sim, marks);
    io::write_events(dir / "e.csv", seq, {"abc", 12});
    const auto back = io::read_events(dir / "e.csv", std::nullopt, &marks);
    CHECK(back.T == seq.T);
    REQUIRE(back.size() == seq.size());
    for (std::size_t n = 0; n < seq.size(0); ++n) {
        CHECK(back.events[0][n].t == seq.events[0][n].t);
        CHECK(back.events[0][n].kappa == seq.events[0][n].kappa);
        CHECK(back.events[0][n].label == seq.events[0][n].label);
    }
    fs::remove_all(dir);
}

TEST_CASE("malformed event rows report their line") {
    const auto dir = scratch("bad");
    io::write_text(dir / "bad.csv", "# horizon=10\ntype_id,time,mark,label\n0,1.0,0.5,1\n0,abc,0.5,1\n");
    CHECK_THROWS_WITH_AS(io::read_events(dir / "bad.csv"), doctest::Contains("line 4"), ParseError);

    io::write_text(dir / "beyond.csv", "# horizon=10\ntype_id,time,mark,label\n0,11.0,0.5,\n");
    CHECK_THROWS_AS(io::read_events(dir / "beyond.csv"), ParseError);

    const auto marks = MarkModel::builtin("identity-linear");
    io::write_text(dir / "mark.csv", "# horizon=10\ntype_id,time,mark,label\n0,1.0,1.5,\n");
    CHECK_THROWS_AS(io::read_events(dir / "mark.csv", std::nullopt, &marks), ParseError);

    io::write_text(dir / "nohorizon.csv", "type_id,time,mark,label\n0,1.0,0.5,\n");
    CHECK_THROWS_AS(io::read_events(dir / "nohorizon.csv"), ConfigError);
    CHECK(io::read_events(dir / "nohorizon.csv", 5.0).size() == 1);

    io::write_text(dir / "unsorted.csv", "# horizon=10\ntype_id,time,mark,label\n0,3.0,0.5,\n0,1.0,0.5,0\n");
    const auto seq = io::read_events(dir / "unsorted.csv");
    CHECK(seq.events[0][0].t == 1.0);
    CHECK(seq.events[0][0].label == 0);
    CHECK_FALSE(seq.events[0][1].label.has_value());
    fs::remove_all(dir);
}

TEST_CASE("parameters round-trip through JSON") {
    const auto mm = testing::marks("identity-smallmark");
    ModelParams p(1, make_raised_cosine(0.7, 0.2, 0.15, 1.0), mm);
    p.mu(0) = 0.123456789012345;
    p.mu_tilde(0) = 1.5;
    const auto q = io::params_from_json(io::params_to_json(p));
    CHECK(q.mu(0) == p.mu(0));
    CHECK(q.mu_tilde(0) == p.mu_tilde(0));
    CHECK(to_vector(q.kernels[0]) == to_vector(p.kernels[0]));
    CHECK(q.marks->name() == "identity-smallmark");

    auto j = io::kernel_to_json(p.kernels[0]);
    j["beta"] = 1.0;
    CHECK_THROWS_AS(io::kernel_from_json(j), ConfigError);
}

TEST_CASE("hashes") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("configuration is strict") {
    using nlohmann::json;
    const auto cfg = RunConfig::from_json(json::parse(R"({"seed": 5, "solver": {"mode": "jointfadin", "n_iter": 100, "b": 10}})"));
    CHECK(cfg.seed == 5);
    CHECK(cfg.solver.mode == FitMode::JointFadin);
    CHECK(cfg.solver.init.seed == 5);
    CHECK(RunConfig::from_json(cfg.to_json()).hash() == cfg.hash());

    CHECK_THROWS_AS(RunConfig::from_json(json::parse(R"({"sede": 5})")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json::parse(R"({"solver": {"nitr": 5}})")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json::parse(R"({"solver": {"n_iter": "many"}})")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json::parse(R"({"solver": {"n_iter": 10, "b": 20}})")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json::parse(R"({"simulation": {"T": -1}})")), ConfigError);

    RunConfig c = RunConfig::from_json(json::parse(R"({"init": {"seed": 9}})"));
    c.override_seed(77);
    CHECK(c.solver.seed == 77);
    CHECK(c.solver.init.seed == 9);
}
