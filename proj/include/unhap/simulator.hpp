#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "unhap/events.hpp"
#include "unhap/kernel.hpp"
#include "unhap/mark_model.hpp"

namespace unhap {

struct SimConfig {
    double mu{0.8};
    double mu_tilde{0.5};
    double T{1000};
    KernelParams kernel{TruncGaussKernel{1.45, 0.5, 0.1, 1.0}};
    std::uint64_t seed{0};
};

/// Expected number of direct offspring per structured event: int(phi) * E_f1[omega].
double branching_ratio(const KernelParams& kernel, const MarkModel& marks);

/// Thinning sampler for the offspring of one parent under intensity
/// rate_scale * shape(s - t_parent), where `shape` is the kernel at unit amplitude.
class OffspringSampler {
public:
    explicit OffspringSampler(const KernelParams& kernel);

    std::vector<double> children(double parent_time, double rate_scale, std::mt19937_64& rng) const;
    double bound() const { return bound_; }

private:
    KernelParams shape_;
    double W_;
    double bound_;
};

std::vector<double> simulate_child_times(const MarkedEvent& parent, double rate_scale,
                                         const KernelParams& kernel, std::mt19937_64& rng);

/// One labelled realisation of the structured Hawkes + Poisson noise mixture
/// on [0, T] (single event type). Structured events carry label 1 and their
/// generation depth; noise events carry label 0.
EventSequence simulate_mixture(const SimConfig& config, const MarkModel& marks);

}  // namespace unhap
