#include "unhap/model.hpp"

#include <algorithm>

namespace unhap {

ModelParams::ModelParams(int D, const KernelParams& kernel, std::shared_ptr<const MarkModel> mark_model)
    : mu(VectorXd::Zero(D)),
      mu_tilde(VectorXd::Zero(D)),
      kernels(static_cast<std::size_t>(D * D), kernel),
      marks(std::move(mark_model)) {}

void ModelParams::project() {
    mu = mu.cwiseMax(0.0);
    mu_tilde = mu_tilde.cwiseMax(0.0);
    for (auto& k : kernels) k = unhap::project(k);
}

bool ModelParams::all_finite() const {
    if (!mu.allFinite() || !mu_tilde.allFinite()) return false;
    return std::all_of(kernels.begin(), kernels.end(),
                       [](const KernelParams& k) { return to_vector(k).allFinite(); });
}

std::size_t MixtureAssignment::size() const {
    std::size_t n = 0;
    for (const auto& r : rho) n += static_cast<std::size_t>(r.size());
    return n;
}

void MixtureAssignment::threshold() {
    hard.resize(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        hard[i].resize(static_cast<std::size_t>(rho[i].size()));
        for (Eigen::Index n = 0; n < rho[i].size(); ++n)
            hard[i][static_cast<std::size_t>(n)] = rho[i](n) > 0.5 ? 1 : 0;
    }
}

void MixtureAssignment::project() {
    for (auto& r : rho) r = r.cwiseMax(0.0).cwiseMin(1.0);
}

MixtureAssignment MixtureAssignment::hardened() const {
    MixtureAssignment out = *this;
    for (std::size_t i = 0; i < rho.size(); ++i)
        for (Eigen::Index n = 0; n < rho[i].size(); ++n)
            out.rho[i](n) = hard[i][static_cast<std::size_t>(n)] ? 1.0 : 0.0;
    return out;
}

}  // namespace unhap
