#include "logarch/core.hpp"
#include "logarch/rng.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

using namespace logarch;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

template <class F>
Moments sample_moments(long n, F&& draw) {
    double s = 0.0, ss = 0.0;
    for (long i = 0; i < n; ++i) {
        const double v = draw();
        s += v;
        ss += v * v;
    }
    const double m = s / static_cast<double>(n);
    return {m, ss / static_cast<double>(n) - m * m};
}

double gig_mean(double lambda, double psi, double chi) {
    const double w = std::sqrt(psi * chi);
    using boost::math::cyl_bessel_k;
    return std::sqrt(chi / psi) * cyl_bessel_k(lambda + 1.0, w) / cyl_bessel_k(lambda, w);
}

double gig_second(double lambda, double psi, double chi) {
    const double w = std::sqrt(psi * chi);
    using boost::math::cyl_bessel_k;
    return (chi / psi) * cyl_bessel_k(lambda + 2.0, w) / cyl_bessel_k(lambda, w);
}

}  // namespace

TEST_SUITE("rng") {

TEST_CASE("fixed seed reproduces the stream and derived streams differ") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
    Rng c = Rng::derive(42, 1), d = Rng::derive(42, 1), e = Rng::derive(42, 2);
    const double x = c.uniform();
    CHECK(x == d.uniform());
    CHECK(x != e.uniform());
}

TEST_CASE("inverse Gaussian moments at mean 2, shape 3") {
    Rng rng(7);
    const long n = 1'000'000;
    const auto m = sample_moments(n, [&] { return rng.inverse_gaussian(2.0, 3.0); });
    const double var = 8.0 / 3.0;
    CHECK(std::abs(m.mean - 2.0) < 3.0 * std::sqrt(var / n));
    // Fourth central moment of IG(mu, l): 15 mu^7 / l^3 + 3 var^2.
    const double mu4 = 15.0 * std::pow(2.0, 7) / 27.0 + 3.0 * var * var;
    CHECK(std::abs(m.var - var) < 3.0 * std::sqrt((mu4 - var * var) / n));
    CHECK_THROWS_AS(rng.inverse_gaussian(-1.0, 1.0), Error);
}

TEST_CASE("generalized inverse Gaussian matches Bessel-function moments") {
    const std::array<std::array<double, 3>, 5> cases{{{0.5, 1.0, 2.0}, {-24.0, 1.0, 30.0}, {3.0, 2.0, 0.01},
                                                       {-0.5, 4.0, 1e-3}, {1.0 - 49.0 / 2.0, 0.3, 5.0}}};
    Rng rng(99);
    const long n = 200'000;
    for (const auto& c : cases) {
        CAPTURE(c[0]);
        CAPTURE(c[1]);
        CAPTURE(c[2]);
        const auto m = sample_moments(n, [&] { return rng.generalized_inverse_gaussian(c[0], c[1], c[2]); });
        const double mean = gig_mean(c[0], c[1], c[2]);
        const double var = gig_second(c[0], c[1], c[2]) - mean * mean;
        CHECK(std::abs(m.mean - mean) < 4.0 * std::sqrt(var / n));
        CHECK(m.var == doctest::Approx(var).epsilon(0.05));
    }
    CHECK_THROWS_AS(rng.generalized_inverse_gaussian(1.0, 0.0, 1.0), Error);
}

TEST_CASE("gamma draws use the rate convention") {
    Rng rng(3);
    const long n = 100'000;
    const auto m = sample_moments(n, [&] { return rng.gamma_rate(3.0, 2.0); });
    CHECK(std::abs(m.mean - 1.5) < 3.0 * std::sqrt(0.75 / n));
}

TEST_CASE("categorical draws follow the weights and survive large offsets") {
    Rng rng(1);
    const std::vector<double> lw{std::log(0.2) - 800.0, std::log(0.5) - 800.0, std::log(0.3) - 800.0};
    std::array<long, 3> counts{};
    const long n = 100'000;
    for (long i = 0; i < n; ++i) ++counts[rng.categorical_log(lw)];
    const std::array<double, 3> p{0.2, 0.5, 0.3};
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(counts[j] / static_cast<double>(n) - p[j]) < 3.0 * std::sqrt(p[j] * (1 - p[j]) / n));
    }
    CHECK_THROWS_AS(rng.categorical_log(std::vector<double>{}), Error);
}

}  // TEST_SUITE
