#pragma once

#include <cstdint>
#include <vector>

#include "unhap/events.hpp"
#include "unhap/mark_model.hpp"
#include "unhap/model.hpp"

namespace unhap {

/// Events of one type projected on the grid {0, step, ..., G * step}.
///
/// Events sharing a node are merged into one slot: weights add, the density
/// caches hold the sum of member densities and the slot carries a single rho.
struct GridSlots {
    std::vector<std::int64_t> bin;    // strictly increasing
    VectorXd weight;                  // sum of omega(kappa) over members
    VectorXd f0;                      // sum of f0(kappa) over members
    VectorXd f1;                      // sum of f1(kappa) over members
    VectorXd mean_mark;               // omega-weighted mean mark
    std::vector<int> members;
    std::vector<std::size_t> slot_of_event;  // input event index -> slot
    VectorXd z;                       // dense weights, length G + 1

    std::size_t size() const { return bin.size(); }
};

struct DiscretizedSequence {
    double step{0};
    double T{0};
    std::int64_t G{0};
    std::vector<GridSlots> types;
    std::size_t merged{0};  // events absorbed into an existing slot
    std::size_t clamped{0}; // events beyond the last node
    double H0{1};
    double H1{1};

    int D() const { return static_cast<int>(types.size()); }
    std::size_t slots() const;
};

/// Nearest-node projection of every event; G = floor(T / step).
DiscretizedSequence discretize_events(const EventSequence& seq, double step, const MarkModel& marks);

/// rho (o) z for type j as a dense length G + 1 vector.
VectorXd weighted_vector(const DiscretizedSequence& dseq, const MixtureAssignment& rho, int j);

/// Assignment with every slot set to `value`.
MixtureAssignment constant_assignment(const DiscretizedSequence& dseq, double value);

/// Per-event labels expanded from per-slot labels.
std::vector<std::vector<int>> event_labels(const DiscretizedSequence& dseq, const MixtureAssignment& rho);
std::vector<std::vector<double>> event_rho(const DiscretizedSequence& dseq, const MixtureAssignment& rho);

}  // namespace unhap
