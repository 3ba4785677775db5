#include "unhap/mark_model.hpp"

#include <algorithm>
#include <cmath>

namespace unhap {

namespace {

constexpr int kPanels = 2048;

// Composite Simpson over each knot segment. `g(kappa, f)` receives the
// segment-local linear density so jumps at repeated knots are handled exactly.
template <typename Fn>
double integrate_segments(const DensityTable& table, Fn&& g) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < table.knots.size(); ++k) {
        const auto [x0, y0] = table.knots[k];
        const auto [x1, y1] = table.knots[k + 1];
        const double width = x1 - x0;
        if (width <= 0.0) continue;
        const double h = width / kPanels;
        auto local = [&](double x) { return g(x, y0 + (y1 - y0) * (x - x0) / width); };
        double acc = local(x0) + local(x1);
        for (int p = 1; p < kPanels; ++p) acc += (p % 2 == 1 ? 4.0 : 2.0) * local(x0 + p * h);
        total += acc * h / 3.0;
    }
    return total;
}

DensityTable linear(double a, double b) { return DensityTable{{{0.0, a}, {1.0, b}}}; }

}  // namespace

double DensityTable::operator()(double kappa) const {
    if (knots.empty() || kappa < knots.front().first || kappa > knots.back().first) return 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const auto [x0, y0] = knots[k];
        const auto [x1, y1] = knots[k + 1];
        if (kappa >= x0 && kappa <= x1) {
            if (x1 == x0) return y0;
            return y0 + (y1 - y0) * (kappa - x0) / (x1 - x0);
        }
    }
    return knots.size() == 1 ? knots.front().second : 0.0;
}

double DensityTable::max_value() const {
    double m = 0.0;
    for (const auto& kv : knots) m = std::max(m, kv.second);
    return m;
}

MarkModel MarkModel::builtin(std::string_view name) {
    if (name == "unmarked") return unmarked();
    MarkModel model;
    model.name_ = std::string(name);
    model.weight_ = MarkWeight::Identity;
    model.f1_ = linear(0.0, 2.0);
    if (name == "identity-linear") {
        model.f0_ = linear(2.0, 0.0);
    } else if (name == "identity-uniform") {
        model.f0_ = linear(1.0, 1.0);
    } else if (name == "identity-smallmark") {
        model.f0_ = DensityTable{{{0.0, 5.0}, {0.2, 5.0}, {0.2, 0.0}, {1.0, 0.0}}};
    } else {
        throw ConfigError("unknown mark model '" + std::string(name) + "'");
    }
    model.finalize();
    return model;
}

MarkModel MarkModel::custom(MarkWeight weight, DensityTable f0, DensityTable f1, std::string name) {
    for (const auto* t : {&f0, &f1}) {
        if (t->knots.size() < 2) throw ConfigError("density table needs at least two knots");
        for (std::size_t k = 0; k < t->knots.size(); ++k) {
            if (t->knots[k].second < 0.0 || !std::isfinite(t->knots[k].second))
                throw ConfigError("density values must be finite and nonnegative");
            if (k > 0 && t->knots[k].first < t->knots[k - 1].first)
                throw ConfigError("density knots must be sorted by mark");
        }
    }
    MarkModel model;
    model.name_ = std::move(name);
    model.weight_ = weight;
    model.f0_ = std::move(f0);
    model.f1_ = std::move(f1);
    model.finalize();
    return model;
}

MarkModel MarkModel::unmarked() {
    MarkModel model;
    model.name_ = "unmarked";
    model.unmarked_ = true;
    model.weight_ = MarkWeight::One;
    model.lo_ = model.hi_ = 1.0;
    model.H0_ = model.H1_ = 1.0;
    model.mean_omega0_ = model.mean_omega1_ = 1.0;
    model.max0_ = model.max1_ = 1.0;
    return model;
}

void MarkModel::finalize() {
    lo_ = std::min(f0_.knots.front().first, f1_.knots.front().first);
    hi_ = std::max(f0_.knots.back().first, f1_.knots.back().first);
    if (!(hi_ > lo_)) throw ConfigError("mark set K must have positive length");

    const auto mass = [](double, double f) { return f; };
    const auto square = [](double, double f) { return f * f; };
    const auto weighted = [this](double kappa, double f) { return omega(kappa) * f; };
    for (const auto* t : {&f0_, &f1_}) {
        if (std::abs(integrate_segments(*t, mass) - 1.0) > 1e-6)
            throw ConfigError("mark density '" + name_ + "' does not integrate to 1 over K");
    }
    H0_ = integrate_segments(f0_, square);
    H1_ = integrate_segments(f1_, square);
    mean_omega0_ = integrate_segments(f0_, weighted);
    mean_omega1_ = integrate_segments(f1_, weighted);
    max0_ = f0_.max_value();
    max1_ = f1_.max_value();
}

double MarkModel::omega(double kappa) const {
    return weight_ == MarkWeight::Identity ? kappa : 1.0;
}

double MarkModel::density(Source source, double kappa) const {
    if (unmarked_) return 1.0;
    return source == Source::Noise ? f0_(kappa) : f1_(kappa);
}

double MarkModel::sample(Source source, std::mt19937_64& rng) const {
    if (unmarked_) return 1.0;
    const double fmax = source == Source::Noise ? max0_ : max1_;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    while (true) {
        const double kappa = lo_ + (hi_ - lo_) * unif(rng);
        if (unif(rng) * fmax < density(source, kappa)) return kappa;
    }
}

}  // namespace unhap
