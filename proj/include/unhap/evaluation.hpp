#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unhap/events.hpp"
#include "unhap/model.hpp"

namespace unhap {

struct Confusion {
    std::size_t tp{0}, fp{0}, fn{0}, tn{0};

    /// 1.0 when nothing was predicted positive.
    double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
    /// 1.0 when there are no positives.
    double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
};

/// Positive class is "structured" (label 1).
Confusion confusion(const std::vector<int>& predicted, const std::vector<int>& truth);

struct PrecisionRecall {
    double precision{1};
    double recall{1};
};
PrecisionRecall rho_precision_recall(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Euclidean distance over the named coordinates. Recognised names: mu,
/// mu_tilde, alpha and the kernel shape names (m, sigma / u, s). An empty
/// list means {mu, alpha, <shape1>, <shape2>}.
double param_error(const ModelParams& estimate, const ModelParams& truth, std::vector<std::string> which = {});

enum class NllPolicy { Mixture, HawkesOnly };

struct NllResult {
    double value{0};
    std::size_t zero_intensity_events{0};
    NllPolicy policy{NllPolicy::Mixture};
};

/// Per-event negative log-likelihood on a held-out sequence. Excitation uses
/// every past test event with weight 1; the compensator is the Riemann sum
/// step * sum_{s=1..G} lambda_g(s * step).
NllResult test_nll(const ModelParams& params, NllPolicy policy, const EventSequence& test, double step);

/// Brute-force mean-field loss: materialises the intensity on every grid node
/// from the double sum over events and lags, evaluating kernels directly.
/// `rho` is given per input event; events projected on the same node must
/// share a value.
double naive_loss_oracle(const ModelParams& params, const std::vector<std::vector<double>>& rho,
                         const EventSequence& seq, double step);

struct MetricsReport {
    std::optional<Confusion> counts;
    std::optional<double> param_error_l2;
    std::optional<NllResult> nll;
    std::vector<std::string> notices;
};

}  // namespace unhap
