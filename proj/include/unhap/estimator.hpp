#pragma once

#include <vector>

#include "unhap/grid.hpp"
#include "unhap/kernel.hpp"
#include "unhap/model.hpp"

namespace unhap {

/// Sufficient statistics of the discretized least-squares loss for a fixed
/// assignment rho. Lag index tau runs over 0..L; lag 0 is never summed and
/// is stored as zero.
///
///   phi(j, tau)            = sum_{s=1..G} zt_j[s - tau]
///   psi[j*D+k](tau, tau')  = sum_{s=1..G} zt_j[s - tau] zt_k[s - tau']
///   xi(j, tau)             = sum_{s=1..G} z_j[s - tau]^2 rho_j[s - tau] - zt_j[s - tau]^2
///   phi_events[i](j, tau)  = sum_{n in i} f1(kappa_n) rho_n zt_j[s_n - tau]
///
/// with zt = rho (o) z and out-of-range indices contributing zero.
struct Precomputations {
    int D{0};
    Eigen::Index L{0};
    std::int64_t G{0};
    double T{0};
    double step{0};
    double H0{1};
    double H1{1};
    MatrixXd phi;
    std::vector<MatrixXd> psi;
    MatrixXd xi;
    std::vector<MatrixXd> phi_events;
    VectorXd noise_mass;       // sum_n f0(kappa_n) (1 - rho_n) per type
    VectorXd structured_mass;  // sum_n f1(kappa_n) rho_n per type

    const MatrixXd& psi_at(int j, int k) const { return psi[static_cast<std::size_t>(j * D + k)]; }
};

Precomputations precompute(const DiscretizedSequence& dseq, const MixtureAssignment& rho, Eigen::Index L);

/// MeanField includes the variance correction term (xi); Hard drops it.
enum class LossKind { MeanField, Hard };

struct ThetaGradient {
    VectorXd mu;
    VectorXd mu_tilde;
    std::vector<KernelVector> eta;  // row-major D x D, (alpha, shape1, shape2)
};

struct LossEvaluation {
    double value{0};
    ThetaGradient grad;
};

/// Loss value and (optionally) the analytic gradient in theta from the
/// precomputed statistics. Cost is independent of the number of events.
LossEvaluation evaluate_theta(const ModelParams& params, const Precomputations& pre, LossKind kind,
                              bool with_grad = true);

/// Diagonal of the Gauss-Newton approximation of the Hessian in theta
/// (exact for the baselines and the kernel amplitudes). Used to scale
/// gradient steps.
ThetaGradient theta_curvature(const ModelParams& params, const Precomputations& pre, LossKind kind);

double loss_meanfield(const ModelParams& params, const MixtureAssignment& rho, const DiscretizedSequence& dseq,
                      const Precomputations& pre);
double loss_meanfield(const ModelParams& params, const MixtureAssignment& rho, const DiscretizedSequence& dseq);
/// Loss with labels fixed to `labels.hard`.
double loss_hard(const ModelParams& params, const MixtureAssignment& labels, const DiscretizedSequence& dseq);

VectorXd grad_mu(const ModelParams& params, const MixtureAssignment& rho, const Precomputations& pre);
VectorXd grad_mu_tilde(const ModelParams& params, const MixtureAssignment& rho, const Precomputations& pre);
std::vector<KernelVector> grad_eta(const ModelParams& params, const MixtureAssignment& rho,
                                   const Precomputations& pre);
/// d loss_meanfield / d rho for every slot, evaluated directly on the grid
/// vectors (it differentiates through the precomputed statistics).
std::vector<VectorXd> grad_rho(const ModelParams& params, const MixtureAssignment& rho,
                               const DiscretizedSequence& dseq);

/// Kernel grid size L for the model's support and the sequence's step.
Eigen::Index kernel_grid_size(const ModelParams& params, const DiscretizedSequence& dseq);

}  // namespace unhap
