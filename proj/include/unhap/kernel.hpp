#pragma once

#include <array>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>

#include "unhap/common.hpp"

namespace unhap {

enum class KernelFamily { TruncatedGaussian, RaisedCosine };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Truncated Gaussian excitation kernel on [0, W], scaled by `alpha`.
///
/// The shape part integrates to one over its support, so `alpha` is the
/// kernel's L1 mass.
template <typename Scalar>
struct TruncGauss {
    Scalar alpha{1};
    Scalar m{0.5};
    Scalar sigma{0.1};
    Scalar W{1};
};

/// Raised-cosine bump alpha * (1 - cos(pi (t - u) / s)) on [u, u + 2s].
template <typename Scalar>
struct RaisedCosine {
    Scalar alpha{1};
    Scalar u{0.4};
    Scalar s{0.1};
    Scalar W{1};
};

using TruncGaussKernel = TruncGauss<double>;
using RaisedCosineKernel = RaisedCosine<double>;
using KernelParams = std::variant<TruncGaussKernel, RaisedCosineKernel>;

/// Kernel parameters as a flat vector: (alpha, shape1, shape2).
using KernelVector = Eigen::Vector3d;
/// One column per kernel parameter, one row per grid lag.
using KernelJacobian = Eigen::Matrix<double, Eigen::Dynamic, 3>;

inline constexpr double kMinWidth = 1e-3;

namespace detail {

template <typename Scalar>
Scalar normal_pdf(Scalar x) {
    return std::exp(-x * x / Scalar(2)) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
Scalar normal_cdf(Scalar x) {
    return Scalar(0.5) * std::erfc(-x / std::numbers::sqrt2_v<Scalar>);
}

}  // namespace detail

template <typename Scalar>
Scalar evaluate(const TruncGauss<Scalar>& k, Scalar t) {
    if (t < Scalar(0) || t > k.W) return Scalar(0);
    const Scalar z = (t - k.m) / k.sigma;
    const Scalar mass = detail::normal_cdf((k.W - k.m) / k.sigma) - detail::normal_cdf(-k.m / k.sigma);
    return k.alpha * detail::normal_pdf(z) / (k.sigma * mass);
}

template <typename Scalar>
Scalar evaluate(const RaisedCosine<Scalar>& k, Scalar t) {
    if (t < k.u || t > k.u + Scalar(2) * k.s) return Scalar(0);
    return k.alpha * (Scalar(1) + std::cos((t - k.u) / k.s * std::numbers::pi_v<Scalar> - std::numbers::pi_v<Scalar>));
}

/// d phi(t) / d(alpha, m, sigma), including the derivative of the normalising mass.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> evaluate_grad(const TruncGauss<Scalar>& k, Scalar t) {
    Eigen::Matrix<Scalar, 3, 1> g = Eigen::Matrix<Scalar, 3, 1>::Zero();
    if (t < Scalar(0) || t > k.W) return g;
    const Scalar a = -k.m / k.sigma;
    const Scalar b = (k.W - k.m) / k.sigma;
    const Scalar mass = detail::normal_cdf(b) - detail::normal_cdf(a);
    const Scalar z = (t - k.m) / k.sigma;
    const Scalar shape = detail::normal_pdf(z) / (k.sigma * mass);
    const Scalar dmass_dm = (detail::normal_pdf(a) - detail::normal_pdf(b)) / k.sigma;
    const Scalar dmass_dsigma = (a * detail::normal_pdf(a) - b * detail::normal_pdf(b)) / k.sigma;
    const Scalar phi = k.alpha * shape;
    g(0) = shape;
    g(1) = phi * (z / k.sigma - dmass_dm / mass);
    g(2) = phi * ((z * z - Scalar(1)) / k.sigma - dmass_dsigma / mass);
    return g;
}

/// d phi(t) / d(alpha, u, s).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> evaluate_grad(const RaisedCosine<Scalar>& k, Scalar t) {
    Eigen::Matrix<Scalar, 3, 1> g = Eigen::Matrix<Scalar, 3, 1>::Zero();
    if (t < k.u || t > k.u + Scalar(2) * k.s) return g;
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar x = pi * (t - k.u) / k.s;
    const Scalar sx = std::sin(x);
    g(0) = Scalar(1) - std::cos(x);
    g(1) = -k.alpha * sx * pi / k.s;
    g(2) = -k.alpha * sx * pi * (t - k.u) / (k.s * k.s);
    return g;
}

/// Kernel value phi(t); zero outside the support.
double evaluate(const KernelParams& kernel, double t);

KernelFamily family(const KernelParams& kernel);
double support_length(const KernelParams& kernel);
double amplitude(const KernelParams& kernel);
/// Integral of phi over its support (amplitude included).
double integral(const KernelParams& kernel);
/// Same kernel with unit amplitude.
KernelParams unit_amplitude(const KernelParams& kernel);
std::array<std::string_view, 3> param_names(KernelFamily family);

KernelVector to_vector(const KernelParams& kernel);
KernelParams with_vector(const KernelParams& kernel, const KernelVector& v);

/// Throws ConfigError unless the kernel invariants hold.
void validate(const KernelParams& kernel);
/// Clamp into the feasible box used by the optimiser.
KernelParams project(const KernelParams& kernel);

KernelParams make_trunc_gauss(double alpha, double m, double sigma, double W);
KernelParams make_raised_cosine(double alpha, double u, double s, double W);

/// Kernel sampled on the lag grid tau * step, tau = 0..L with L = floor(W / step).
/// `values` holds L + 1 entries; loss sums only use tau = 1..L.
struct DiscreteKernel {
    double step{0};
    Eigen::Index L{0};
    VectorXd values;
};

DiscreteKernel discretize(const KernelParams& kernel, double step);
/// Analytic d phi(tau * step) / d param, rows tau = 0..L.
KernelJacobian param_grad(const KernelParams& kernel, double step);

}  // namespace unhap
