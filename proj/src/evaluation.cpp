#include "unhap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "unhap/grid.hpp"

namespace unhap {

Confusion confusion(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) throw ConfigError("predicted and true label vectors differ in length");
    Confusion c;
    for (std::size_t n = 0; n < truth.size(); ++n) {
        const bool p = predicted[n] == 1;
        const bool t = truth[n] == 1;
        if (p && t) ++c.tp;
        else if (p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

PrecisionRecall rho_precision_recall(const std::vector<int>& predicted, const std::vector<int>& truth) {
    const Confusion c = confusion(predicted, truth);
    return {c.precision(), c.recall()};
}

double param_error(const ModelParams& estimate, const ModelParams& truth, std::vector<std::string> which) {
    if (estimate.D() != truth.D()) throw ConfigError("parameter sets have different dimensions");
    for (std::size_t k = 0; k < truth.kernels.size(); ++k)
        if (family(estimate.kernels[k]) != family(truth.kernels[k]))
            throw ConfigError("parameter sets use different kernel families");
    const auto names = param_names(truth.family());
    if (which.empty()) which = {"mu", "alpha", std::string(names[1]), std::string(names[2])};

    double sq = 0.0;
    for (const auto& name : which) {
        if (name == "mu") {
            sq += (estimate.mu - truth.mu).squaredNorm();
        } else if (name == "mu_tilde") {
            sq += (estimate.mu_tilde - truth.mu_tilde).squaredNorm();
        } else {
            const auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) throw ConfigError("unknown parameter coordinate '" + name + "'");
            const auto idx = static_cast<Eigen::Index>(it - names.begin());
            for (std::size_t k = 0; k < truth.kernels.size(); ++k) {
                const double d = to_vector(estimate.kernels[k])(idx) - to_vector(truth.kernels[k])(idx);
                sq += d * d;
            }
        }
    }
    return std::sqrt(sq);
}

NllResult test_nll(const ModelParams& params, NllPolicy policy, const EventSequence& test, double step) {
    if (test.empty()) throw ConfigError("test sequence has no events");
    if (test.D() != params.D()) throw ConfigError("test sequence dimension does not match the model");
    const MarkModel& marks = *params.marks;
    const DiscretizedSequence dseq = discretize_events(test, step, marks);
    const Eigen::Index L = static_cast<Eigen::Index>(grid_count(params.W(), step));
    const int D = params.D();
    const std::int64_t G = dseq.G;
    const bool mixture = policy == NllPolicy::Mixture;

    NllResult out;
    out.policy = policy;
    double log_sum = 0.0;
    double compensator = 0.0;
    for (int i = 0; i < D; ++i) {
        VectorXd conv = VectorXd::Zero(G + 1);
        for (int j = 0; j < D; ++j) {
            const VectorXd phi = discretize(params.kernel(i, j), step).values;
            const auto& slots = dseq.types[static_cast<std::size_t>(j)];
            for (std::size_t a = 0; a < slots.size(); ++a) {
                const std::int64_t b = slots.bin[a];
                const Eigen::Index top = std::min<Eigen::Index>(L, static_cast<Eigen::Index>(G - b));
                for (Eigen::Index tau = 1; tau <= top; ++tau) conv(b + tau) += phi(tau) * slots.weight(static_cast<Eigen::Index>(a));
            }
        }
        const double mu = params.mu(i);
        const double mut = mixture ? params.mu_tilde(i) : 0.0;
        compensator += step * (static_cast<double>(G) * (mu + mut) + conv.tail(G).sum());
        const auto& events = test.events[static_cast<std::size_t>(i)];
        const auto& slots = dseq.types[static_cast<std::size_t>(i)];
        for (std::size_t n = 0; n < events.size(); ++n) {
            const double kappa = events[n].kappa;
            const std::int64_t b = slots.bin[slots.slot_of_event[n]];
            const double lambda = (mu + conv(b)) * marks.f1(kappa) + mut * marks.f0(kappa);
            if (!(lambda > 0.0)) {
                ++out.zero_intensity_events;
                continue;
            }
            log_sum += std::log(lambda);
        }
    }
    if (out.zero_intensity_events > 0) {
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    out.value = -(log_sum - compensator) / static_cast<double>(test.size());
    return out;
}

double naive_loss_oracle(const ModelParams& params, const std::vector<std::vector<double>>& rho,
                         const EventSequence& seq, double step) {
    const MarkModel& marks = *params.marks;
    const int D = params.D();
    if (seq.D() != D || static_cast<int>(rho.size()) != D) throw ConfigError("oracle inputs have mismatched types");
    const double T = seq.T;
    const std::int64_t G = grid_count(T, step);
    const std::int64_t L = grid_count(params.W(), step);
    if (static_cast<double>(G) * static_cast<double>(L) * static_cast<double>(std::max<std::size_t>(seq.size(), 1)) > 1e8)
        throw ConfigError("instance too large for the brute-force oracle");

    struct Projected {
        std::int64_t bin;
        double kappa;
        double rho;
    };
    struct Node {
        double z{0}, zt{0}, rho{-1};
    };
    std::vector<std::vector<Projected>> proj(static_cast<std::size_t>(D));
    std::vector<std::map<std::int64_t, Node>> nodes(static_cast<std::size_t>(D));
    for (int j = 0; j < D; ++j) {
        const auto& ev = seq.events[static_cast<std::size_t>(j)];
        if (rho[static_cast<std::size_t>(j)].size() != ev.size()) throw ConfigError("rho is not aligned with events");
        for (std::size_t n = 0; n < ev.size(); ++n) {
            const std::int64_t bin = std::clamp<std::int64_t>(std::llround(ev[n].t / step), 0, G);
            const double r = rho[static_cast<std::size_t>(j)][n];
            proj[static_cast<std::size_t>(j)].push_back({bin, ev[n].kappa, r});
            Node& node = nodes[static_cast<std::size_t>(j)][bin];
            if (node.rho >= 0 && node.rho != r) throw ConfigError("events sharing a grid node must share rho");
            node.rho = r;
            node.z += marks.omega(ev[n].kappa);
            node.zt += r * marks.omega(ev[n].kappa);
        }
    }

    double total = 0.0;
    for (int i = 0; i < D; ++i) {
        std::vector<double> intensity(static_cast<std::size_t>(G + 1), params.mu(i));
        std::vector<double> correction(static_cast<std::size_t>(G + 1), 0.0);
        for (std::int64_t s = 0; s <= G; ++s) {
            for (int j = 0; j < D; ++j) {
                const KernelParams& k = params.kernel(i, j);
                for (const auto& e : proj[static_cast<std::size_t>(j)]) {
                    const std::int64_t lag = s - e.bin;
                    if (lag < 1 || lag > L) continue;
                    intensity[static_cast<std::size_t>(s)] +=
                        evaluate(k, static_cast<double>(lag) * step) * e.rho * marks.omega(e.kappa);
                }
                for (const auto& [bin, node] : nodes[static_cast<std::size_t>(j)]) {
                    const std::int64_t lag = s - bin;
                    if (lag < 1 || lag > L) continue;
                    const double p = evaluate(k, static_cast<double>(lag) * step);
                    correction[static_cast<std::size_t>(s)] += p * p * (node.z * node.z * node.rho - node.zt * node.zt);
                }
            }
        }
        const double mu = params.mu(i);
        const double mut = params.mu_tilde(i);
        double squares = 0.0;
        double corr = 0.0;
        for (std::int64_t s = 1; s <= G; ++s) {
            squares += intensity[static_cast<std::size_t>(s)] * intensity[static_cast<std::size_t>(s)];
            corr += correction[static_cast<std::size_t>(s)];
        }
        double li = T * marks.H0() * mut * mut;
        li += marks.H1() * (step * squares + (T - static_cast<double>(G) * step) * mu * mu);
        li += step * corr;
        for (const auto& e : proj[static_cast<std::size_t>(i)]) {
            li -= 2.0 * (1.0 - e.rho) * mut * marks.f0(e.kappa);
            li -= 2.0 * e.rho * intensity[static_cast<std::size_t>(e.bin)] * marks.f1(e.kappa);
        }
        total += li;
    }
    return total;
}

}  // namespace unhap
