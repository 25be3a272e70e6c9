#include "logarch/mixture.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

using namespace logarch;

TEST_SUITE("mixture") {

TEST_CASE("table constants") {
    const auto& t = mixture_table();
    const std::array<double, 10> p{0.00609, 0.04775, 0.13057, 0.20674, 0.22715,
                                   0.18842, 0.12047, 0.05591, 0.01575, 0.00115};
    const std::array<double, 10> mu{1.92677,  1.34744,  0.73504,  0.02266,  -0.85173,
                                    -1.97278, -3.46788, -5.55246, -8.68384, -14.65000};
    const std::array<double, 10> s2{0.11265, 0.17788, 0.26768, 0.40611, 0.62699,
                                    0.98583, 1.57469, 2.54498, 4.16591, 7.33342};
    for (std::size_t j = 0; j < 10; ++j) {
        CHECK(t.p[j] == p[j]);
        CHECK(t.mu[j] == mu[j]);
        CHECK(t.sigma2[j] == s2[j]);
        CHECK(t.sigma2[j] > 0.0);
    }
    double sum = 0.0;
    for (double v : t.p) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-5);
}

TEST_CASE("mixture moments approximate the log chi-squared moments") {
    const auto& t = mixture_table();
    CHECK(std::abs(t.mean() - (-1.2704)) < 0.01);
    CHECK(std::abs(t.variance() - std::numbers::pi * std::numbers::pi / 2.0) < 0.01);
    CHECK(kLogChi2Mean == doctest::Approx(-1.2704).epsilon(1e-4));
}

TEST_CASE("exact density values and normalization") {
    CHECK(log_chi2_density(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * std::exp(1.0))));
    // Simpson's rule on [-40, 10].
    const int n = 50000;
    const double a = -40.0, b = 10.0, h = (b - a) / n;
    double mass = 0.0, first = 0.0, second = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = a + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double f = log_chi2_density(x);
        mass += w * f;
        first += w * x * f;
        second += w * x * x * f;
    }
    mass *= h / 3.0;
    first *= h / 3.0;
    second *= h / 3.0;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(first == doctest::Approx(kLogChi2Mean).epsilon(1e-6));
    CHECK(second - first * first == doctest::Approx(kLogChi2Variance).epsilon(1e-6));
}

TEST_CASE("mixture density tracks the exact density") {
    double gap = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double x = -15.0 + 0.01 * i;
        gap = std::max(gap, std::abs(mixture_density(x) - log_chi2_density(x)));
    }
    CHECK(gap < 0.01);
    CHECK(mixture_density(-200.0) == 0.0);
    CHECK(std::isfinite(mixture_log_density(-200.0)));
    CHECK(mixture_log_density(-200.0) < -1000.0);
}

TEST_CASE("component posterior") {
    for (double x : {-30.0, -5.0, 0.0, 1.92677, 4.0}) {
        const auto w = component_posterior(x);
        double s = 0.0;
        for (double v : w) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto w = component_posterior(1.92677);
    CHECK(w[0] > w[9]);
}

TEST_CASE("mixture error draws") {
    Rng rng(2024);
    const long n = 1'000'000;
    std::array<long, 10> counts{};
    double sum = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto d = sample_mixture_error(rng);
        ++counts[d.component];
        sum += d.value;
    }
    const auto& t = mixture_table();
    for (std::size_t j = 0; j < 10; ++j) {
        const double se = std::sqrt(t.p[j] * (1.0 - t.p[j]) / n);
        CHECK(std::abs(counts[j] / static_cast<double>(n) - t.p[j]) < 3.0 * se);
    }
    CHECK(std::abs(sum / n - (-1.27)) < 0.02);

    Rng a(9), b(9);
    for (int i = 0; i < 50; ++i) {
        const auto x = sample_mixture_error(a);
        const auto y = sample_mixture_error(b);
        CHECK(x.component == y.component);
        CHECK(x.value == y.value);
    }
}

}  // TEST_SUITE
