#include "logarch/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace logarch {

const MixtureTable& mixture_table() {
    static const MixtureTable table{
        {0.00609, 0.04775, 0.13057, 0.20674, 0.22715, 0.18842, 0.12047, 0.05591, 0.01575, 0.00115},
        {1.92677, 1.34744, 0.73504, 0.02266, -0.85173, -1.97278, -3.46788, -5.55246, -8.68384, -14.65000},
        {0.11265, 0.17788, 0.26768, 0.40611, 0.62699, 0.98583, 1.57469, 2.54498, 4.16591, 7.33342},
    };
    return table;
}

double MixtureTable::mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < kMixtureComponents; ++j) m += p[j] * mu[j];
    return m;
}

double MixtureTable::variance() const {
    const double m = mean();
    double second = 0.0;
    for (std::size_t j = 0; j < kMixtureComponents; ++j) second += p[j] * (sigma2[j] + mu[j] * mu[j]);
    return second - m * m;
}

double log_chi2_density(double x) {
    return std::exp(-0.5 * (std::exp(x) - x)) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

std::array<double, kMixtureComponents> log_terms(double x, const MixtureTable& t) {
    std::array<double, kMixtureComponents> out{};
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < kMixtureComponents; ++j) {
        const double r = x - t.mu[j];
        out[j] = std::log(t.p[j]) - half_log_2pi - 0.5 * std::log(t.sigma2[j]) - 0.5 * r * r / t.sigma2[j];
    }
    return out;
}

}  // namespace

double mixture_log_density(double x, const MixtureTable& table) {
    const auto terms = log_terms(x, table);
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double v : terms) acc += std::exp(v - top);
    return top + std::log(acc);
}

double mixture_density(double x, const MixtureTable& table) {
    return std::exp(mixture_log_density(x, table));
}

std::array<double, kMixtureComponents> component_posterior(double x, const MixtureTable& table) {
    auto terms = log_terms(x, table);
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double& v : terms) {
        v = std::exp(v - top);
        acc += v;
    }
    for (double& v : terms) v /= acc;
    return terms;
}

MixtureDraw sample_mixture_error(Rng& rng, const MixtureTable& table) {
    std::array<double, kMixtureComponents> logp{};
    for (std::size_t j = 0; j < kMixtureComponents; ++j) logp[j] = std::log(table.p[j]);
    const std::size_t c = rng.categorical_log(logp);
    return {c, rng.normal(table.mu[c], std::sqrt(table.sigma2[c]))};
}

}  // namespace logarch
