#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "unhap/events.hpp"
#include "unhap/model.hpp"

namespace unhap {

enum class InitScheme { MomentsMax, MomentsMean, Random };
/// Predecessor window for the inter-event delays: `Absolute` keeps events
/// with W < t < t_n, `Relative` keeps t_n - W < t < t_n.
enum class DelayWindow { Absolute, Relative };
enum class RhoInit { Half, Bernoulli };

struct InitConfig {
    InitScheme scheme{InitScheme::MomentsMax};
    DelayWindow window{DelayWindow::Absolute};
    RhoInit rho_init{RhoInit::Half};
    std::uint64_t seed{0};
};

InitScheme parse_init_scheme(std::string_view name);
DelayWindow parse_delay_window(std::string_view name);
RhoInit parse_rho_init(std::string_view name);
std::string_view to_string(InitScheme scheme);
std::string_view to_string(DelayWindow window);
std::string_view to_string(RhoInit rho_init);

struct MomentReport {
    /// Types pairs (i, j) whose delay moments fell back to (W/2, W/4).
    std::size_t fallbacks{0};
};

/// Moment-matching initial parameters. The noise share is one half of every
/// type's count: mu_tilde T = N / 2 and mu T + sum_j alpha_ij sum omega_j = N / 2,
/// with the structured half split evenly between the baseline and the D kernels.
/// The matched alpha is the kernel amplitude for both families.
ModelParams moment_match(const EventSequence& seq, KernelFamily family, double W,
                         std::shared_ptr<const MarkModel> marks, InitScheme scheme,
                         DelayWindow window = DelayWindow::Absolute, MomentReport* report = nullptr);

/// Baselines and amplitudes ~ U(0, 1), shape parameters uniform in the
/// feasible box.
ModelParams random_init(int D, KernelFamily family, double W, std::shared_ptr<const MarkModel> marks,
                        std::uint64_t seed);

}  // namespace unhap
