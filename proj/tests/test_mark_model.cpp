#include "doctest.h"

#include <random>
#include <vector>

#include "unhap/mark_model.hpp"

using namespace unhap;

TEST_CASE("built-in mark models") {
    const auto linear = MarkModel::builtin("identity-linear");
    CHECK(linear.H1() == doctest::Approx(4.0 / 3.0));
    CHECK(linear.H0() == doctest::Approx(4.0 / 3.0));
    CHECK(linear.expected_omega(Source::Structured) == doctest::Approx(2.0 / 3.0));
    CHECK(linear.f1(0.25) == doctest::Approx(0.5));
    CHECK(linear.f0(0.25) == doctest::Approx(1.5));
    CHECK(linear.omega(0.3) == doctest::Approx(0.3));

    const auto uniform = MarkModel::builtin("identity-uniform");
    CHECK(uniform.H0() == doctest::Approx(1.0));
    CHECK(uniform.expected_omega(Source::Noise) == doctest::Approx(0.5));

    const auto small = MarkModel::builtin("identity-smallmark");
    CHECK(small.H0() == doctest::Approx(5.0));
    CHECK(small.f0(0.1) == doctest::Approx(5.0));
    CHECK(small.f0(0.5) == 0.0);

    const auto none = MarkModel::unmarked();
    CHECK(none.is_unmarked());
    CHECK(none.omega(1.0) == 1.0);
    CHECK(none.H0() == 1.0);
    CHECK(none.H1() == 1.0);

    CHECK_THROWS_AS(MarkModel::builtin("gaussian"), ConfigError);
}

TEST_CASE("structured mark samples follow f1") {
    const auto linear = MarkModel::builtin("identity-linear");
    std::mt19937_64 rng(11);
    constexpr int bins = 10;
    constexpr int n = 10000;
    std::vector<int> counts(bins, 0);
    for (int k = 0; k < n; ++k) {
        const double x = linear.sample(Source::Structured, rng);
        REQUIRE(x >= 0.0);
        REQUIRE(x <= 1.0);
        ++counts[std::min(bins - 1, static_cast<int>(x * bins))];
    }
    double chi2 = 0;
    for (int b = 0; b < bins; ++b) {
        // integral of 2x over the bin
        const double lo = static_cast<double>(b) / bins, hi = static_cast<double>(b + 1) / bins;
        const double expected = n * (hi * hi - lo * lo);
        chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
    }
    // 0.999 quantile of chi-square with 9 degrees of freedom
    CHECK(chi2 < 27.877);
}

TEST_CASE("noise mark samples follow f0") {
    const auto small = MarkModel::builtin("identity-smallmark");
    std::mt19937_64 rng(3);
    for (int k = 0; k < 2000; ++k) {
        const double x = small.sample(Source::Noise, rng);
        CHECK(x >= 0.0);
        CHECK(x <= 0.2);
    }
}
