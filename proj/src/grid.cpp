#include "unhap/grid.hpp"

#include <cmath>

namespace unhap {

std::size_t DiscretizedSequence::slots() const {
    std::size_t n = 0;
    for (const auto& t : types) n += t.size();
    return n;
}

DiscretizedSequence discretize_events(const EventSequence& seq, double step, const MarkModel& marks) {
    if (!(step > 0)) throw ConfigError("grid step must be > 0");
    if (step >= seq.T) throw ConfigError("grid step must be smaller than the horizon T");

    DiscretizedSequence out;
    out.step = step;
    out.T = seq.T;
    out.G = grid_count(seq.T, step);
    out.H0 = marks.H0();
    out.H1 = marks.H1();
    out.types.resize(static_cast<std::size_t>(seq.D()));

    for (int j = 0; j < seq.D(); ++j) {
        const auto& events = seq.events[static_cast<std::size_t>(j)];
        GridSlots& slots = out.types[static_cast<std::size_t>(j)];
        std::vector<double> w, f0, f1, mark_sum;
        slots.slot_of_event.reserve(events.size());
        std::int64_t prev_bin = -1;
        for (const auto& e : events) {
            std::int64_t b = std::llround(e.t / step);
            if (b > out.G) {
                b = out.G;
                ++out.clamped;
            }
            b = std::max<std::int64_t>(b, 0);
            if (b < prev_bin) throw InternalError("event sequence is not sorted by time");
            const double omega = marks.omega(e.kappa);
            if (b == prev_bin) {
                ++out.merged;
                w.back() += omega;
                f0.back() += marks.f0(e.kappa);
                f1.back() += marks.f1(e.kappa);
                mark_sum.back() += omega * e.kappa;
                ++slots.members.back();
            } else {
                slots.bin.push_back(b);
                w.push_back(omega);
                f0.push_back(marks.f0(e.kappa));
                f1.push_back(marks.f1(e.kappa));
                mark_sum.push_back(omega * e.kappa);
                slots.members.push_back(1);
                prev_bin = b;
            }
            slots.slot_of_event.push_back(slots.bin.size() - 1);
        }
        const auto n = static_cast<Eigen::Index>(slots.bin.size());
        slots.weight = Eigen::Map<const VectorXd>(w.data(), n);
        slots.f0 = Eigen::Map<const VectorXd>(f0.data(), n);
        slots.f1 = Eigen::Map<const VectorXd>(f1.data(), n);
        slots.mean_mark.resize(n);
        for (Eigen::Index s = 0; s < n; ++s)
            slots.mean_mark(s) = w[static_cast<std::size_t>(s)] > 0 ? mark_sum[static_cast<std::size_t>(s)] / w[static_cast<std::size_t>(s)] : 0.0;
        slots.z = VectorXd::Zero(out.G + 1);
        for (Eigen::Index s = 0; s < n; ++s) slots.z(slots.bin[static_cast<std::size_t>(s)]) = slots.weight(s);
    }
    return out;
}

VectorXd weighted_vector(const DiscretizedSequence& dseq, const MixtureAssignment& rho, int j) {
    const auto& slots = dseq.types.at(static_cast<std::size_t>(j));
    if (rho.D() != dseq.D() || static_cast<std::size_t>(rho.rho[static_cast<std::size_t>(j)].size()) != slots.size())
        throw InternalError("mixture assignment is not aligned with the discretized sequence");
    VectorXd out = VectorXd::Zero(dseq.G + 1);
    const VectorXd& r = rho.rho[static_cast<std::size_t>(j)];
    for (std::size_t s = 0; s < slots.size(); ++s)
        out(slots.bin[s]) = r(static_cast<Eigen::Index>(s)) * slots.weight(static_cast<Eigen::Index>(s));
    return out;
}

MixtureAssignment constant_assignment(const DiscretizedSequence& dseq, double value) {
    MixtureAssignment a;
    for (const auto& slots : dseq.types)
        a.rho.push_back(VectorXd::Constant(static_cast<Eigen::Index>(slots.size()), value));
    a.threshold();
    return a;
}

std::vector<std::vector<int>> event_labels(const DiscretizedSequence& dseq, const MixtureAssignment& rho) {
    std::vector<std::vector<int>> out(dseq.types.size());
    for (std::size_t j = 0; j < dseq.types.size(); ++j)
        for (std::size_t slot : dseq.types[j].slot_of_event) out[j].push_back(rho.hard[j][slot]);
    return out;
}

std::vector<std::vector<double>> event_rho(const DiscretizedSequence& dseq, const MixtureAssignment& rho) {
    std::vector<std::vector<double>> out(dseq.types.size());
    for (std::size_t j = 0; j < dseq.types.size(); ++j)
        for (std::size_t slot : dseq.types[j].slot_of_event)
            out[j].push_back(rho.rho[j](static_cast<Eigen::Index>(slot)));
    return out;
}

}  // namespace unhap
