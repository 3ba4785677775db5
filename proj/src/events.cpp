#include "unhap/events.hpp"

#include <algorithm>

namespace unhap {

std::size_t EventSequence::size() const {
    std::size_t n = 0;
    for (const auto& list : events) n += list.size();
    return n;
}

bool EventSequence::has_labels() const {
    if (empty()) return false;
    for (const auto& list : events)
        for (const auto& e : list)
            if (!e.label) return false;
    return true;
}

void EventSequence::sort_and_separate(double nudge) {
    for (auto& list : events) {
        std::stable_sort(list.begin(), list.end(),
                         [](const MarkedEvent& a, const MarkedEvent& b) { return a.t < b.t; });
        for (std::size_t n = 1; n < list.size(); ++n)
            if (list[n].t <= list[n - 1].t) list[n].t = list[n - 1].t + nudge;
    }
}

}  // namespace unhap
