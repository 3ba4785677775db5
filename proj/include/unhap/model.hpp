#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "unhap/common.hpp"
#include "unhap/kernel.hpp"
#include "unhap/mark_model.hpp"

namespace unhap {

/// Hawkes baselines mu, noise baselines mu_tilde and the D x D kernel matrix
/// (kernel(i, j) is the effect of type j on type i).
struct ModelParams {
    VectorXd mu;
    VectorXd mu_tilde;
    std::vector<KernelParams> kernels;
    std::shared_ptr<const MarkModel> marks;

    ModelParams() = default;
    ModelParams(int D, const KernelParams& kernel, std::shared_ptr<const MarkModel> mark_model);

    int D() const { return static_cast<int>(mu.size()); }
    KernelParams& kernel(int i, int j) { return kernels[static_cast<std::size_t>(i * D() + j)]; }
    const KernelParams& kernel(int i, int j) const { return kernels[static_cast<std::size_t>(i * D() + j)]; }
    double W() const { return support_length(kernels.front()); }
    KernelFamily family() const { return unhap::family(kernels.front()); }

    /// Clamp baselines to >= 0 and kernels into their feasible boxes.
    void project();
    bool all_finite() const;
};

/// Relaxed labels rho in [0, 1] and hard labels Y = 1{rho > 1/2}, one entry
/// per grid slot (pseudo-event) of each type.
struct MixtureAssignment {
    std::vector<VectorXd> rho;
    std::vector<std::vector<std::uint8_t>> hard;

    int D() const { return static_cast<int>(rho.size()); }
    std::size_t size() const;

    /// Recompute hard labels; ties at exactly 1/2 go to noise.
    void threshold();
    void project();
    /// rho replaced by the hard labels.
    MixtureAssignment hardened() const;
};

}  // namespace unhap
