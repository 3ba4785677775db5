#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "unhap/evaluation.hpp"
#include "unhap/solver.hpp"

namespace unhap {

struct SimulationSection {
    double T{1000};
    double mu{0.8};
    double mu_tilde{0.5};
    KernelParams kernel{TruncGaussKernel{1.45, 0.5, 0.1, 1.0}};
    std::string marks{"identity-linear"};
};

struct ModelSection {
    std::string marks{"identity-linear"};
};

struct MetricsSection {
    /// Defaults to mixture for unhap fits and hawkes-only for the baselines.
    std::optional<NllPolicy> nll_policy;
    std::vector<std::string> param_coords;
};

struct PathsSection {
    std::optional<std::string> events;
    std::optional<std::string> truth;
    std::optional<std::string> fit;
    std::optional<std::string> test_events;
};

/// Fully resolved run configuration. Every section is optional in the file;
/// unknown keys anywhere are rejected.
struct RunConfig {
    std::uint64_t seed{0};
    SimulationSection simulation;
    ModelSection model;
    SolverConfig solver;
    MetricsSection metrics;
    PathsSection paths;

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
    /// SHA-256 of the canonical resolved JSON.
    std::string hash() const;
    /// Replace the global seed; the init seed follows unless it was set explicitly.
    void override_seed(std::uint64_t s);

    bool init_seed_explicit{false};
};

std::string_view to_string(NllPolicy policy);
NllPolicy parse_nll_policy(std::string_view name);

}  // namespace unhap
