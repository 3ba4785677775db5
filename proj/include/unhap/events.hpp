#pragma once

#include <optional>
#include <vector>

#include "unhap/common.hpp"

namespace unhap {

struct MarkedEvent {
    double t{0};
    double kappa{1};
    std::optional<int> label;  // 0 noise, 1 structured
    std::optional<int> gen;    // 0 = immigrant
};

/// Time-sorted marked events for each of D types on [0, T].
struct EventSequence {
    double T{0};
    std::vector<std::vector<MarkedEvent>> events;

    EventSequence() = default;
    EventSequence(double horizon, int types) : T(horizon), events(static_cast<std::size_t>(types)) {}

    int D() const { return static_cast<int>(events.size()); }
    std::size_t size() const;
    std::size_t size(int type) const { return events[static_cast<std::size_t>(type)].size(); }
    bool empty() const { return size() == 0; }
    bool has_labels() const;

    /// Sort every type by time and break exact ties by nudging the later event.
    void sort_and_separate(double nudge = 1e-9);
};

}  // namespace unhap
