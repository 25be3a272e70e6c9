#pragma once

#include "logarch/rng.hpp"

#include <array>
#include <cstddef>

namespace logarch {

inline constexpr std::size_t kMixtureComponents = 10;

/// Ten-component normal mixture approximating the log-chi-squared(1) law.
struct MixtureTable {
    std::array<double, kMixtureComponents> p;
    std::array<double, kMixtureComponents> mu;
    std::array<double, kMixtureComponents> sigma2;

    [[nodiscard]] double mean() const;
    [[nodiscard]] double variance() const;
};

/// The fixed table used throughout (Omori-style ten components).
const MixtureTable& mixture_table();

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Mean and variance of log(chi^2_1).
inline constexpr double kLogChi2Mean = -kEulerGamma - 0.69314718055994530942;
inline constexpr double kLogChi2Variance = 4.93480220054467930942;  // pi^2 / 2

/// Exact density of log(eps^2), eps ~ N(0, 1).
double log_chi2_density(double x);

/// log of the mixture density, evaluated with a max-shift.
double mixture_log_density(double x, const MixtureTable& table = mixture_table());

double mixture_density(double x, const MixtureTable& table = mixture_table());

/// Posterior probabilities of the ten components given a residual x.
std::array<double, kMixtureComponents> component_posterior(double x,
                                                          const MixtureTable& table = mixture_table());

struct MixtureDraw {
    std::size_t component;  // 0-based
    double value;
};

MixtureDraw sample_mixture_error(Rng& rng, const MixtureTable& table = mixture_table());

}  // namespace logarch
