#include "unhap/estimator.hpp"

#include <algorithm>

namespace unhap {

namespace {

using Index = Eigen::Index;

void check_alignment(const DiscretizedSequence& dseq, const MixtureAssignment& rho) {
    if (rho.D() != dseq.D()) throw InternalError("mixture assignment has the wrong number of types");
    for (int j = 0; j < dseq.D(); ++j)
        if (static_cast<std::size_t>(rho.rho[static_cast<std::size_t>(j)].size()) != dseq.types[static_cast<std::size_t>(j)].size())
            throw InternalError("mixture assignment is not aligned with the discretized sequence");
}

// sum_{s=1..G} x[s - tau] = sum over slots with bin <= G - tau.
VectorXd truncated_sums(const std::vector<std::int64_t>& bins, const VectorXd& values, Index L, std::int64_t G) {
    const Index n = values.size();
    VectorXd prefix(n + 1);
    prefix(0) = 0.0;
    for (Index a = 0; a < n; ++a) prefix(a + 1) = prefix(a) + values(a);
    VectorXd out = VectorXd::Zero(L + 1);
    Index count = n;
    for (Index tau = 1; tau <= L; ++tau) {
        while (count > 0 && bins[static_cast<std::size_t>(count - 1)] > G - tau) --count;
        out(tau) = prefix(count);
    }
    return out;
}

MatrixXd cross_statistic(const GridSlots& sj, const VectorXd& ztj, const GridSlots& sk, const VectorXd& ztk,
                         Index L, std::int64_t G) {
    MatrixXd M = MatrixXd::Zero(L + 1, L + 1);
    std::vector<double> diagonal(static_cast<std::size_t>(2 * L + 1), 0.0);  // index delta + L
    const std::size_t nk = sk.size();
    std::size_t c_lo = 0;
    for (std::size_t a = 0; a < sj.size(); ++a) {
        const double za = ztj(static_cast<Index>(a));
        if (za == 0.0) continue;
        const std::int64_t ba = sj.bin[a];
        while (c_lo < nk && sk.bin[c_lo] <= ba - L) ++c_lo;
        const bool full = ba + L <= G;
        for (std::size_t c = c_lo; c < nk && sk.bin[c] < ba + L; ++c) {
            const double v = za * ztk(static_cast<Index>(c));
            if (v == 0.0) continue;
            const Index delta = static_cast<Index>(ba - sk.bin[c]);
            if (full) {
                diagonal[static_cast<std::size_t>(delta + L)] += v;
                continue;
            }
            const Index lo = std::max<Index>(1, 1 - delta);
            const Index hi = std::min<Index>({L, L - delta, static_cast<Index>(G - ba)});
            for (Index tau = lo; tau <= hi; ++tau) M(tau, tau + delta) += v;
        }
    }
    for (Index tau = 1; tau <= L; ++tau)
        for (Index tau2 = 1; tau2 <= L; ++tau2) M(tau, tau2) += diagonal[static_cast<std::size_t>(tau2 - tau + L)];
    return M;
}

struct KernelGrid {
    VectorXd values;       // lag 0 zeroed
    KernelJacobian jac;    // lag 0 zeroed
};

std::vector<KernelGrid> kernel_grids(const ModelParams& params, double step, Index L, bool with_grad) {
    std::vector<KernelGrid> out;
    out.reserve(params.kernels.size());
    for (const auto& k : params.kernels) {
        KernelGrid g;
        g.values = discretize(k, step).values;
        if (g.values.size() != L + 1) throw InternalError("kernel grid size does not match precomputations");
        g.values(0) = 0.0;
        if (with_grad) {
            g.jac = param_grad(k, step);
            g.jac.row(0).setZero();
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace

Eigen::Index kernel_grid_size(const ModelParams& params, const DiscretizedSequence& dseq) {
    return static_cast<Eigen::Index>(grid_count(params.W(), dseq.step));
}

Precomputations precompute(const DiscretizedSequence& dseq, const MixtureAssignment& rho, Eigen::Index L) {
    check_alignment(dseq, rho);
    if (L < 1 || L > dseq.G) throw ConfigError("kernel grid size L must satisfy 1 <= L <= G");
    const int D = dseq.D();
    Precomputations pre;
    pre.D = D;
    pre.L = L;
    pre.G = dseq.G;
    pre.T = dseq.T;
    pre.step = dseq.step;
    pre.H0 = dseq.H0;
    pre.H1 = dseq.H1;
    pre.phi = MatrixXd::Zero(D, L + 1);
    pre.xi = MatrixXd::Zero(D, L + 1);
    pre.noise_mass = VectorXd::Zero(D);
    pre.structured_mass = VectorXd::Zero(D);

    std::vector<VectorXd> zt(static_cast<std::size_t>(D));
    std::vector<VectorXd> dense(static_cast<std::size_t>(D));
    for (int j = 0; j < D; ++j) {
        const auto& slots = dseq.types[static_cast<std::size_t>(j)];
        const VectorXd& r = rho.rho[static_cast<std::size_t>(j)];
        zt[static_cast<std::size_t>(j)] = r.cwiseProduct(slots.weight);
        const VectorXd& ztj = zt[static_cast<std::size_t>(j)];
        const VectorXd var = slots.weight.cwiseProduct(slots.weight).cwiseProduct(r) - ztj.cwiseProduct(ztj);
        pre.phi.row(j) = truncated_sums(slots.bin, ztj, L, dseq.G).transpose();
        pre.xi.row(j) = truncated_sums(slots.bin, var, L, dseq.G).transpose();
        pre.noise_mass(j) = slots.f0.dot((VectorXd::Ones(r.size()) - r));
        pre.structured_mass(j) = slots.f1.dot(r);
        dense[static_cast<std::size_t>(j)] = weighted_vector(dseq, rho, j);
    }

    pre.psi.resize(static_cast<std::size_t>(D * D));
    for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k)
            pre.psi[static_cast<std::size_t>(j * D + k)] =
                cross_statistic(dseq.types[static_cast<std::size_t>(j)], zt[static_cast<std::size_t>(j)],
                                dseq.types[static_cast<std::size_t>(k)], zt[static_cast<std::size_t>(k)], L, dseq.G);

    pre.phi_events.resize(static_cast<std::size_t>(D));
    for (int i = 0; i < D; ++i) {
        MatrixXd& pe = pre.phi_events[static_cast<std::size_t>(i)];
        pe = MatrixXd::Zero(D, L + 1);
        const auto& slots = dseq.types[static_cast<std::size_t>(i)];
        const VectorXd& r = rho.rho[static_cast<std::size_t>(i)];
        for (std::size_t n = 0; n < slots.size(); ++n) {
            const double c = slots.f1(static_cast<Index>(n)) * r(static_cast<Index>(n));
            if (c == 0.0) continue;
            const std::int64_t b = slots.bin[n];
            const Index top = std::min<Index>(L, static_cast<Index>(b));
            for (int j = 0; j < D; ++j) {
                const VectorXd& zj = dense[static_cast<std::size_t>(j)];
                for (Index tau = 1; tau <= top; ++tau) pe(j, tau) += c * zj(b - tau);
            }
        }
    }
    return pre;
}

LossEvaluation evaluate_theta(const ModelParams& params, const Precomputations& pre, LossKind kind, bool with_grad) {
    const int D = pre.D;
    if (params.D() != D) throw InternalError("parameter dimension does not match precomputations");
    const Index L = pre.L;
    const double T = pre.T;
    const double dt = pre.step;
    const double H0 = pre.H0;
    const double H1 = pre.H1;
    const bool correction = kind == LossKind::MeanField;
    const auto grids = kernel_grids(params, dt, L, with_grad);

    LossEvaluation out;
    if (with_grad) {
        out.grad.mu = VectorXd::Zero(D);
        out.grad.mu_tilde = VectorXd::Zero(D);
        out.grad.eta.assign(static_cast<std::size_t>(D * D), KernelVector::Zero());
    }
    double total = 0.0;
    VectorXd v(L + 1);
    for (int i = 0; i < D; ++i) {
        const double mu = params.mu(i);
        const double mut = params.mu_tilde(i);
        const MatrixXd& pe = pre.phi_events[static_cast<std::size_t>(i)];
        double li = T * (H1 * mu * mu + H0 * mut * mut);
        li -= 2.0 * (mut * pre.noise_mass(i) + mu * pre.structured_mass(i));
        double excitation_mass = 0.0;  // sum_j phi_ij . Phi_j
        for (int j = 0; j < D; ++j) {
            const VectorXd& phi_ij = grids[static_cast<std::size_t>(i * D + j)].values;
            v.setZero();
            for (int k = 0; k < D; ++k) v.noalias() += pre.psi_at(j, k) * grids[static_cast<std::size_t>(i * D + k)].values;
            const double lin = phi_ij.dot(pre.phi.row(j).transpose());
            excitation_mass += lin;
            li += 2.0 * dt * H1 * mu * lin;
            li += dt * H1 * phi_ij.dot(v);
            if (correction) li += dt * phi_ij.cwiseProduct(phi_ij).dot(pre.xi.row(j).transpose());
            li -= 2.0 * phi_ij.dot(pe.row(j).transpose());
            if (with_grad) {
                VectorXd dphi = 2.0 * dt * H1 * mu * pre.phi.row(j).transpose() + 2.0 * dt * H1 * v -
                                2.0 * pe.row(j).transpose();
                if (correction) dphi += 2.0 * dt * phi_ij.cwiseProduct(pre.xi.row(j).transpose());
                dphi(0) = 0.0;
                out.grad.eta[static_cast<std::size_t>(i * D + j)] =
                    grids[static_cast<std::size_t>(i * D + j)].jac.transpose() * dphi;
            }
        }
        if (with_grad) {
            out.grad.mu(i) = 2.0 * T * H1 * mu + 2.0 * dt * H1 * excitation_mass - 2.0 * pre.structured_mass(i);
            out.grad.mu_tilde(i) = 2.0 * T * H0 * mut - 2.0 * pre.noise_mass(i);
        }
        total += li;
    }
    out.value = total;
    return out;
}

ThetaGradient theta_curvature(const ModelParams& params, const Precomputations& pre, LossKind kind) {
    const int D = pre.D;
    if (params.D() != D) throw InternalError("parameter dimension does not match precomputations");
    const double dt = pre.step;
    const auto grids = kernel_grids(params, dt, pre.L, true);
    ThetaGradient h;
    h.mu = VectorXd::Constant(D, 2.0 * pre.T * pre.H1);
    h.mu_tilde = VectorXd::Constant(D, 2.0 * pre.T * pre.H0);
    h.eta.assign(static_cast<std::size_t>(D * D), KernelVector::Zero());
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            const KernelJacobian& J = grids[static_cast<std::size_t>(i * D + j)].jac;
            const MatrixXd& psi = pre.psi_at(j, j);
            KernelVector& out = h.eta[static_cast<std::size_t>(i * D + j)];
            for (Index p = 0; p < 3; ++p) {
                const VectorXd col = J.col(p);
                out(p) = 2.0 * dt * pre.H1 * col.dot(psi * col);
                if (kind == LossKind::MeanField) out(p) += 2.0 * dt * col.cwiseAbs2().dot(pre.xi.row(j).transpose());
            }
        }
    }
    return h;
}

double loss_meanfield(const ModelParams& params, const MixtureAssignment& rho, const DiscretizedSequence& dseq,
                      const Precomputations& pre) {
#ifndef NDEBUG
    check_alignment(dseq, rho);
    for (int j = 0; j < dseq.D(); ++j)
        if (dseq.types[static_cast<std::size_t>(j)].f1.dot(rho.rho[static_cast<std::size_t>(j)]) != pre.structured_mass(j))
            throw InternalError("precomputations are stale for this assignment");
#else
    (void)rho;
    (void)dseq;
#endif
    return evaluate_theta(params, pre, LossKind::MeanField, false).value;
}

double loss_meanfield(const ModelParams& params, const MixtureAssignment& rho, const DiscretizedSequence& dseq) {
    return evaluate_theta(params, precompute(dseq, rho, kernel_grid_size(params, dseq)), LossKind::MeanField, false)
        .value;
}

double loss_hard(const ModelParams& params, const MixtureAssignment& labels, const DiscretizedSequence& dseq) {
    const Precomputations pre = precompute(dseq, labels.hardened(), kernel_grid_size(params, dseq));
    return evaluate_theta(params, pre, LossKind::Hard, false).value;
}

VectorXd grad_mu(const ModelParams& params, const MixtureAssignment&, const Precomputations& pre) {
    return evaluate_theta(params, pre, LossKind::MeanField).grad.mu;
}

VectorXd grad_mu_tilde(const ModelParams& params, const MixtureAssignment&, const Precomputations& pre) {
    return evaluate_theta(params, pre, LossKind::MeanField).grad.mu_tilde;
}

std::vector<KernelVector> grad_eta(const ModelParams& params, const MixtureAssignment&, const Precomputations& pre) {
    return evaluate_theta(params, pre, LossKind::MeanField).grad.eta;
}

std::vector<VectorXd> grad_rho(const ModelParams& params, const MixtureAssignment& rho,
                               const DiscretizedSequence& dseq) {
    check_alignment(dseq, rho);
    const int D = dseq.D();
    const Index L = kernel_grid_size(params, dseq);
    const std::int64_t G = dseq.G;
    const double dt = dseq.step;
    const double H1 = dseq.H1;
    const auto grids = kernel_grids(params, dt, L, false);

    // conv[i][s] = sum_j sum_tau phi_ij[tau] zt_j[s - tau];  reward[i][s] = f1 rho at slot in bin s.
    std::vector<VectorXd> conv(static_cast<std::size_t>(D), VectorXd::Zero(G + 1));
    std::vector<VectorXd> reward(static_cast<std::size_t>(D), VectorXd::Zero(G + 1));
    for (int j = 0; j < D; ++j) {
        const auto& slots = dseq.types[static_cast<std::size_t>(j)];
        const VectorXd& r = rho.rho[static_cast<std::size_t>(j)];
        for (std::size_t a = 0; a < slots.size(); ++a) {
            const double za = r(static_cast<Index>(a)) * slots.weight(static_cast<Index>(a));
            const std::int64_t b = slots.bin[a];
            reward[static_cast<std::size_t>(j)](b) = slots.f1(static_cast<Index>(a)) * r(static_cast<Index>(a));
            if (za == 0.0) continue;
            const Index top = std::min<Index>(L, static_cast<Index>(G - b));
            for (int i = 0; i < D; ++i) {
                const VectorXd& phi = grids[static_cast<std::size_t>(i * D + j)].values;
                VectorXd& c = conv[static_cast<std::size_t>(i)];
                for (Index tau = 1; tau <= top; ++tau) c(b + tau) += phi(tau) * za;
            }
        }
    }

    std::vector<VectorXd> out(static_cast<std::size_t>(D));
    for (int m = 0; m < D; ++m) {
        const auto& slots = dseq.types[static_cast<std::size_t>(m)];
        const VectorXd& r = rho.rho[static_cast<std::size_t>(m)];
        VectorXd& g = out[static_cast<std::size_t>(m)];
        g.resize(static_cast<Index>(slots.size()));
        for (std::size_t u = 0; u < slots.size(); ++u) {
            const Index ui = static_cast<Index>(u);
            const double z = slots.weight(ui);
            const double zt = r(ui) * z;
            const std::int64_t b = slots.bin[u];
            const Index top = std::min<Index>(L, static_cast<Index>(G - b));
            double forward = 0.0;
            for (int i = 0; i < D; ++i) {
                const VectorXd& phi = grids[static_cast<std::size_t>(i * D + m)].values;
                const VectorXd& c = conv[static_cast<std::size_t>(i)];
                const VectorXd& rw = reward[static_cast<std::size_t>(i)];
                const double mu = params.mu(i);
                for (Index tau = 1; tau <= top; ++tau) {
                    const double p = phi(tau);
                    forward += p * (2.0 * dt * H1 * (mu + c(b + tau)) + dt * p * (z - 2.0 * zt) - 2.0 * rw(b + tau));
                }
            }
            const double own = -params.mu_tilde(m) * slots.f0(ui) + params.mu(m) * slots.f1(ui) +
                               slots.f1(ui) * conv[static_cast<std::size_t>(m)](b);
            g(ui) = z * forward - 2.0 * own;
        }
    }
    return out;
}

}  // namespace unhap
