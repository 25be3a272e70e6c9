#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace logarch {

/// Caller-owned random stream. Each chain holds its own instance.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream `stream` derived from `seed`.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        return Rng(seq);
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal() { return normal_(engine_); }
    double normal(double mean, double sd) { return mean + sd * normal_(engine_); }

    /// Gamma with the rate parameterisation, density ~ x^{shape-1} exp(-rate x).
    double gamma_rate(double shape, double rate) {
        return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
    }
    double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }

    /// Inverse Gaussian with the given mean and shape (Michael, Schucany and Haas).
    double inverse_gaussian(double mean, double shape);

    /// Generalized inverse Gaussian, density ~ x^{lambda-1} exp(-(psi x + chi / x) / 2),
    /// with psi > 0 and chi > 0.
    double generalized_inverse_gaussian(double lambda, double psi, double chi);

    /// Index drawn with probability proportional to exp(log_weights[j]).
    std::size_t categorical_log(std::span<const double> log_weights);

    std::mt19937_64& engine() { return engine_; }

private:
    explicit Rng(std::seed_seq& seq) : engine_(seq) {}

    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace logarch
