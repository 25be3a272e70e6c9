#include "logarch/rng.hpp"

#include "logarch/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace logarch {

double Rng::inverse_gaussian(double mean, double shape) {
    if (!(mean > 0.0) || !(shape > 0.0)) throw Error("inverse_gaussian: mean and shape must be positive");
    const double nu = normal();
    const double y = nu * nu;
    const double my = mean * y;
    const double x = mean + mean * my / (2.0 * shape) -
                     mean / (2.0 * shape) * std::sqrt(4.0 * shape * my + my * my);
    if (uniform() * (mean + x) <= mean) return x;
    return mean * mean / x;
}

namespace {

// Log-density of log(X) for X ~ GIG(lambda, psi, chi), up to a constant.
struct LogGigKernel {
    double lambda, psi, chi;
    [[nodiscard]] double value(double u) const {
        return lambda * u - 0.5 * (psi * std::exp(u) + chi * std::exp(-u));
    }
    [[nodiscard]] double slope(double u) const {
        return lambda - 0.5 * (psi * std::exp(u) - chi * std::exp(-u));
    }
    [[nodiscard]] double curvature(double u) const {
        return -0.5 * (psi * std::exp(u) + chi * std::exp(-u));
    }
};

// Point on one side of the mode where the kernel has dropped by one unit.
double unit_drop(const LogGigKernel& k, double mode, double h_mode, double direction) {
    double step = 1.0 / std::sqrt(-k.curvature(mode));
    double inner = mode;
    double outer = mode + direction * step;
    while (k.value(outer) > h_mode - 1.0) {
        inner = outer;
        step *= 2.0;
        outer = mode + direction * step;
    }
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (inner + outer);
        if (k.value(mid) > h_mode - 1.0) inner = mid;
        else outer = mid;
    }
    return 0.5 * (inner + outer);
}

}  // namespace

double Rng::generalized_inverse_gaussian(double lambda, double psi, double chi) {
    if (!(psi > 0.0) || !(chi > 0.0)) throw Error("generalized_inverse_gaussian: psi and chi must be positive");
    // Rejection from a three-tangent exponential hull on the log scale, where
    // the kernel is concave for every lambda.
    const LogGigKernel k{lambda, psi, chi};
    const double root = std::sqrt(lambda * lambda + psi * chi);
    const double x_mode = lambda >= 0.0 ? (lambda + root) / psi : chi / (root - lambda);
    const double mode = std::log(x_mode);
    const double h_mode = k.value(mode);

    const double ul = unit_drop(k, mode, h_mode, -1.0);
    const double ur = unit_drop(k, mode, h_mode, +1.0);
    const double al = k.slope(ul);
    const double ar = k.slope(ur);
    const double zl = ul + (h_mode - k.value(ul)) / al;
    const double zr = ur + (h_mode - k.value(ur)) / ar;

    const double mass_left = 1.0 / al;
    const double mass_mid = zr - zl;
    const double mass_right = -1.0 / ar;
    const double total = mass_left + mass_mid + mass_right;

    for (;;) {
        const double pick = uniform() * total;
        double u = 0.0;
        double envelope = 0.0;  // log hull relative to h_mode
        if (pick < mass_left) {
            u = zl + std::log(1.0 - uniform()) / al;
            envelope = al * (u - zl);
        } else if (pick < mass_left + mass_mid) {
            u = zl + uniform() * mass_mid;
        } else {
            u = zr + std::log(1.0 - uniform()) / ar;
            envelope = ar * (u - zr);
        }
        const double log_accept = k.value(u) - h_mode - envelope;
        if (std::log(1.0 - uniform()) <= log_accept) return std::exp(u);
    }
}

std::size_t Rng::categorical_log(std::span<const double> log_weights) {
    constexpr std::size_t kMaxCategories = 64;
    const std::size_t n = log_weights.size();
    if (n == 0 || n > kMaxCategories) throw Error("categorical_log: between 1 and 64 categories supported");
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    double total = 0.0;
    double cumulative[kMaxCategories];
    for (std::size_t j = 0; j < n; ++j) {
        total += std::exp(log_weights[j] - top);
        cumulative[j] = total;
    }
    const double target = uniform() * total;
    for (std::size_t j = 0; j < n; ++j) {
        if (target < cumulative[j]) return j;
    }
    return n - 1;
}

}  // namespace logarch
