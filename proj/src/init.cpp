#include "unhap/init.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace unhap {

InitScheme parse_init_scheme(std::string_view name) {
    if (name == "moments-max") return InitScheme::MomentsMax;
    if (name == "moments-mean") return InitScheme::MomentsMean;
    if (name == "random") return InitScheme::Random;
    throw ConfigError("unknown init scheme '" + std::string(name) + "'");
}

DelayWindow parse_delay_window(std::string_view name) {
    if (name == "absolute") return DelayWindow::Absolute;
    if (name == "relative") return DelayWindow::Relative;
    throw ConfigError("unknown delay window '" + std::string(name) + "'");
}

RhoInit parse_rho_init(std::string_view name) {
    if (name == "half") return RhoInit::Half;
    if (name == "bernoulli") return RhoInit::Bernoulli;
    throw ConfigError("unknown rho_init '" + std::string(name) + "'");
}

std::string_view to_string(InitScheme scheme) {
    switch (scheme) {
        case InitScheme::MomentsMax: return "moments-max";
        case InitScheme::MomentsMean: return "moments-mean";
        case InitScheme::Random: return "random";
    }
    return "?";
}

std::string_view to_string(DelayWindow window) { return window == DelayWindow::Absolute ? "absolute" : "relative"; }
std::string_view to_string(RhoInit rho_init) { return rho_init == RhoInit::Half ? "half" : "bernoulli"; }

namespace {

// Delays from each event of `target` to its admissible predecessors in `source`.
std::vector<double> delays(const std::vector<MarkedEvent>& target, const std::vector<MarkedEvent>& source, double W,
                           InitScheme scheme, DelayWindow window) {
    std::vector<double> times;
    times.reserve(source.size());
    for (const auto& e : source) times.push_back(e.t);
    std::vector<double> prefix(times.size() + 1, 0.0);
    for (std::size_t a = 0; a < times.size(); ++a) prefix[a + 1] = prefix[a] + times[a];

    std::vector<double> out;
    for (const auto& e : target) {
        const double lower = window == DelayWindow::Absolute ? W : e.t - W;
        const auto first = std::upper_bound(times.begin(), times.end(), lower);
        const auto last = std::lower_bound(times.begin(), times.end(), e.t);
        if (first >= last) continue;
        if (scheme == InitScheme::MomentsMax) {
            out.push_back(e.t - *(last - 1));
        } else {
            const auto lo = static_cast<std::size_t>(first - times.begin());
            const auto hi = static_cast<std::size_t>(last - times.begin());
            out.push_back(e.t - (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo));
        }
    }
    return out;
}

}  // namespace

ModelParams moment_match(const EventSequence& seq, KernelFamily family, double W,
                         std::shared_ptr<const MarkModel> marks, InitScheme scheme, DelayWindow window,
                         MomentReport* report) {
    if (seq.empty()) throw ConfigError("moment matching needs at least one event");
    if (scheme == InitScheme::Random) throw ConfigError("moment matching needs a moments-* scheme");
    if (!(W > 0)) throw ConfigError("kernel support W must be > 0");
    const int D = seq.D();
    const double T = seq.T;
    const auto dd = static_cast<double>(D);

    std::vector<double> omega_sum(static_cast<std::size_t>(D), 0.0);
    for (int j = 0; j < D; ++j)
        for (const auto& e : seq.events[static_cast<std::size_t>(j)]) omega_sum[static_cast<std::size_t>(j)] += marks->omega(e.kappa);

    const KernelParams placeholder = family == KernelFamily::TruncatedGaussian
                                         ? make_trunc_gauss(0.0, W / 2, W / 4, W)
                                         : make_raised_cosine(0.0, W / 4, W / 4, W);
    ModelParams params(D, placeholder, marks);
    for (int i = 0; i < D; ++i) {
        const auto N = static_cast<double>(seq.size(i));
        params.mu_tilde(i) = N / (2.0 * T);
        params.mu(i) = N / (2.0 * T * (dd + 1.0));
        for (int j = 0; j < D; ++j) {
            const double wsum = omega_sum[static_cast<std::size_t>(j)];
            const double alpha = wsum > 0 ? N / (2.0 * (dd + 1.0) * wsum) : 0.0;

            const auto dts = delays(seq.events[static_cast<std::size_t>(i)], seq.events[static_cast<std::size_t>(j)],
                                    W, scheme, window);
            double m = W / 2;
            double sigma = W / 4;
            if (dts.size() >= 2) {
                const auto n = static_cast<double>(dts.size());
                double sum = 0.0;
                for (double d : dts) sum += d;
                m = sum / n;
                double ss = 0.0;
                for (double d : dts) ss += (d - m) * (d - m);
                sigma = std::sqrt(ss / (n - 1.0));
            } else if (report) {
                ++report->fallbacks;
            }
            if (family == KernelFamily::TruncatedGaussian) {
                params.kernel(i, j) = project(KernelParams{TruncGaussKernel{alpha, m, sigma, W}});
            } else {
                params.kernel(i, j) = project(KernelParams{RaisedCosineKernel{alpha, std::max(0.0, m - sigma), sigma, W}});
            }
        }
    }
    return params;
}

ModelParams random_init(int D, KernelFamily family, double W, std::shared_ptr<const MarkModel> marks,
                        std::uint64_t seed) {
    if (D < 1) throw ConfigError("need at least one event type");
    if (!(W > 2 * kMinWidth)) throw ConfigError("kernel support W is too small");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    ModelParams params(D, make_trunc_gauss(0.0, W / 2, W / 4, W), marks);
    for (int i = 0; i < D; ++i) params.mu(i) = unit(rng);
    for (int i = 0; i < D; ++i) params.mu_tilde(i) = unit(rng);
    for (auto& k : params.kernels) {
        const double alpha = unit(rng);
        if (family == KernelFamily::TruncatedGaussian) {
            const double m = uniform(0.0, W);
            k = make_trunc_gauss(alpha, m, uniform(kMinWidth, W), W);
        } else {
            const double u = uniform(0.0, W - 2 * kMinWidth);
            k = make_raised_cosine(alpha, u, uniform(kMinWidth, (W - u) / 2), W);
        }
    }
    return params;
}

}  // namespace unhap
