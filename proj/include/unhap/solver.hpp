#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "unhap/estimator.hpp"
#include "unhap/events.hpp"
#include "unhap/init.hpp"

namespace unhap {

enum class FitMode { Unhap, JointFadin, FadinUnmarked };
FitMode parse_fit_mode(std::string_view name);
std::string_view to_string(FitMode mode);

struct SolverConfig {
    int n_iter{10000};
    int b{200};
    /// Multipliers of the curvature-scaled gradient step for the baselines
    /// and amplitudes, and for the kernel shape parameters.
    double step_theta{0.5};
    double step_shape{0.5};
    /// Largest change of a shape parameter in one step, as a fraction of W.
    double shape_trust{0.05};
    double step_rho{0.1};
    int e_inner_steps{1};
    double step{0.01};  // grid step
    double W{1.0};
    KernelFamily family{KernelFamily::TruncatedGaussian};
    FitMode mode{FitMode::Unhap};
    InitConfig init;
    std::uint64_t seed{0};
    int max_halvings{5};

    /// Throws ConfigError when the settings are inconsistent.
    void validate() const;
};

struct FitTiming {
    double init_s{0};
    double precompute_s{0};
    double theta_s{0};
    double rho_s{0};
};

struct FitResult {
    ModelParams params;
    ModelParams initial;
    /// Per grid slot; `labels` expands the hard labels to input events.
    MixtureAssignment rho;
    std::vector<std::vector<int>> labels;
    std::vector<std::vector<double>> event_rho;
    /// Loss after every theta step (hard-label loss in unhap mode).
    std::vector<double> loss_trace;
    std::size_t refreshes{0};
    int halvings{0};
    std::size_t merged_events{0};
    std::size_t clamped_events{0};
    std::size_t moment_fallbacks{0};
    /// Share of theta steps that did not increase the loss of their block.
    double monotone_fraction{1};
    FitTiming timing;
};

/// Fit the mixture model (or a baseline) to `seq`. `marks` describes omega and
/// the two densities; it is ignored in fadin-unmarked mode.
FitResult fit(const EventSequence& seq, std::shared_ptr<const MarkModel> marks, const SolverConfig& cfg);

/// Hard labels per input event: 1 iff rho > 1/2.
std::vector<std::vector<int>> predict_labels(const FitResult& result);

}  // namespace unhap
