#pragma once

#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unhap/common.hpp"

namespace unhap {

/// Which process a mark density belongs to.
enum class Source { Noise = 0, Structured = 1 };

enum class MarkWeight { Identity, One };

/// Piecewise-linear density given by (kappa, value) knots. Repeated kappa
/// values encode jumps; the density is zero outside [front, back].
struct DensityTable {
    std::vector<std::pair<double, double>> knots;

    double operator()(double kappa) const;
    double max_value() const;
};

/// Mark weight omega and the two mark densities f0 (noise) and f1
/// (structured) on a compact mark set K = [lo, hi].
///
/// Squared-density integrals H0, H1 and expectations of omega are cached at
/// construction. All built-in densities are piecewise linear, and the
/// quadrature is exact for them.
class MarkModel {
public:
    static MarkModel builtin(std::string_view name);
    static MarkModel custom(MarkWeight weight, DensityTable f0, DensityTable f1, std::string name = "custom");
    /// omega == 1, both densities a point mass at kappa = 1 (counting measure).
    static MarkModel unmarked();

    const std::string& name() const { return name_; }
    bool is_unmarked() const { return unmarked_; }
    MarkWeight weight_kind() const { return weight_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool contains(double kappa) const { return kappa >= lo_ - 1e-12 && kappa <= hi_ + 1e-12; }

    double omega(double kappa) const;
    double density(Source source, double kappa) const;
    double f0(double kappa) const { return density(Source::Noise, kappa); }
    double f1(double kappa) const { return density(Source::Structured, kappa); }

    /// H_l = integral of f_l^2 over K.
    double H(Source source) const { return source == Source::Noise ? H0_ : H1_; }
    double H0() const { return H0_; }
    double H1() const { return H1_; }

    /// E[omega(kappa)] with kappa drawn from the given density.
    double expected_omega(Source source) const {
        return source == Source::Noise ? mean_omega0_ : mean_omega1_;
    }

    const DensityTable& table(Source source) const { return source == Source::Noise ? f0_ : f1_; }

    double sample(Source source, std::mt19937_64& rng) const;

private:
    MarkModel() = default;
    void finalize();

    std::string name_;
    bool unmarked_{false};
    MarkWeight weight_{MarkWeight::Identity};
    DensityTable f0_;
    DensityTable f1_;
    double lo_{0};
    double hi_{1};
    double H0_{0};
    double H1_{0};
    double mean_omega0_{0};
    double mean_omega1_{0};
    double max0_{0};
    double max1_{0};
};

}  // namespace unhap
