#include "unhap/kernel.hpp"

#include <algorithm>

namespace unhap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::TruncatedGaussian: return "truncated_gaussian";
        case KernelFamily::RaisedCosine: return "raised_cosine";
    }
    return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
    if (name == "truncated_gaussian" || name == "trunc_gauss") return KernelFamily::TruncatedGaussian;
    if (name == "raised_cosine") return KernelFamily::RaisedCosine;
    throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

double evaluate(const KernelParams& kernel, double t) {
    return std::visit([t](const auto& k) { return evaluate(k, t); }, kernel);
}

KernelFamily family(const KernelParams& kernel) {
    return std::holds_alternative<TruncGaussKernel>(kernel) ? KernelFamily::TruncatedGaussian
                                                            : KernelFamily::RaisedCosine;
}

double support_length(const KernelParams& kernel) {
    return std::visit([](const auto& k) { return k.W; }, kernel);
}

double amplitude(const KernelParams& kernel) {
    return std::visit([](const auto& k) { return k.alpha; }, kernel);
}

double integral(const KernelParams& kernel) {
    return std::visit(overloaded{
                          [](const TruncGaussKernel& k) { return k.alpha; },
                          [](const RaisedCosineKernel& k) { return 2.0 * k.alpha * k.s; },
                      },
                      kernel);
}

KernelParams unit_amplitude(const KernelParams& kernel) {
    return std::visit(
        [](auto k) -> KernelParams {
            k.alpha = 1.0;
            return k;
        },
        kernel);
}

std::array<std::string_view, 3> param_names(KernelFamily family) {
    if (family == KernelFamily::TruncatedGaussian) return {"alpha", "m", "sigma"};
    return {"alpha", "u", "s"};
}

KernelVector to_vector(const KernelParams& kernel) {
    return std::visit(overloaded{
                          [](const TruncGaussKernel& k) { return KernelVector(k.alpha, k.m, k.sigma); },
                          [](const RaisedCosineKernel& k) { return KernelVector(k.alpha, k.u, k.s); },
                      },
                      kernel);
}

KernelParams with_vector(const KernelParams& kernel, const KernelVector& v) {
    return std::visit(overloaded{
                          [&v](TruncGaussKernel k) -> KernelParams {
                              k.alpha = v(0);
                              k.m = v(1);
                              k.sigma = v(2);
                              return k;
                          },
                          [&v](RaisedCosineKernel k) -> KernelParams {
                              k.alpha = v(0);
                              k.u = v(1);
                              k.s = v(2);
                              return k;
                          },
                      },
                      kernel);
}

void validate(const KernelParams& kernel) {
    std::visit(overloaded{
                   [](const TruncGaussKernel& k) {
                       if (!(k.W > 0)) throw ConfigError("kernel support W must be > 0");
                       if (!(k.sigma > 0)) throw ConfigError("truncated gaussian sigma must be > 0");
                       if (!(k.alpha >= 0)) throw ConfigError("kernel amplitude must be >= 0");
                       if (!std::isfinite(k.m)) throw ConfigError("truncated gaussian mean must be finite");
                   },
                   [](const RaisedCosineKernel& k) {
                       if (!(k.W > 0)) throw ConfigError("kernel support W must be > 0");
                       if (!(k.s > 0)) throw ConfigError("raised cosine half-width must be > 0");
                       if (!(k.u >= 0)) throw ConfigError("raised cosine onset must be >= 0");
                       if (!(k.alpha >= 0)) throw ConfigError("kernel amplitude must be >= 0");
                       if (k.u + 2.0 * k.s > k.W * (1.0 + 1e-12))
                           throw ConfigError("raised cosine support u + 2s exceeds W");
                   },
               },
               kernel);
}

KernelParams project(const KernelParams& kernel) {
    return std::visit(overloaded{
                          [](TruncGaussKernel k) -> KernelParams {
                              k.alpha = std::max(k.alpha, 0.0);
                              k.m = std::clamp(k.m, 0.0, k.W);
                              k.sigma = std::clamp(k.sigma, kMinWidth, k.W);
                              return k;
                          },
                          [](RaisedCosineKernel k) -> KernelParams {
                              k.alpha = std::max(k.alpha, 0.0);
                              k.u = std::clamp(k.u, 0.0, k.W - 2.0 * kMinWidth);
                              k.s = std::clamp(k.s, kMinWidth, (k.W - k.u) / 2.0);
                              return k;
                          },
                      },
                      kernel);
}

KernelParams make_trunc_gauss(double alpha, double m, double sigma, double W) {
    KernelParams k = TruncGaussKernel{alpha, m, sigma, W};
    validate(k);
    return k;
}

KernelParams make_raised_cosine(double alpha, double u, double s, double W) {
    KernelParams k = RaisedCosineKernel{alpha, u, s, W};
    validate(k);
    return k;
}

namespace {

Eigen::Index lag_count(const KernelParams& kernel, double step) {
    const double W = support_length(kernel);
    if (!(step > 0) || step > W * (1.0 + 1e-12))
        throw ConfigError("kernel grid step must satisfy 0 < step <= W");
    return static_cast<Eigen::Index>(grid_count(W, step));
}

}  // namespace

DiscreteKernel discretize(const KernelParams& kernel, double step) {
    DiscreteKernel out;
    out.step = step;
    out.L = lag_count(kernel, step);
    out.values.resize(out.L + 1);
    std::visit(
        [&out, step](const auto& k) {
            for (Eigen::Index tau = 0; tau <= out.L; ++tau)
                out.values(tau) = evaluate(k, static_cast<double>(tau) * step);
        },
        kernel);
    return out;
}

KernelJacobian param_grad(const KernelParams& kernel, double step) {
    const Eigen::Index L = lag_count(kernel, step);
    KernelJacobian jac(L + 1, 3);
    std::visit(
        [&jac, L, step](const auto& k) {
            for (Eigen::Index tau = 0; tau <= L; ++tau)
                jac.row(tau) = evaluate_grad(k, static_cast<double>(tau) * step).transpose();
        },
        kernel);
    return jac;
}

}  // namespace unhap
