#pragma once

#include "logarch/core.hpp"
#include "logarch/mixture.hpp"
#include "logarch/posterior.hpp"
#include "logarch/rng.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace logarch {

/// Hyperparameters of the independent priors. Empty blocks take the diffuse
/// defaults (zero mean, 100*I covariance) at the size required by the model.
/// A 1-element lambda block is broadcast to b*1 and B*I.
struct PriorSpec {
    Eigen::Vector2d phi_mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d phi_cov = 100.0 * Eigen::Matrix2d::Identity();
    Eigen::VectorXd beta_mean;
    Eigen::MatrixXd beta_cov;
    Eigen::VectorXd lambda_mean;
    Eigen::MatrixXd lambda_cov;
    /// Uniform support of rho; defaults to the invertibility interval of M.
    std::optional<std::pair<double, double>> rho_support;
    bool enforce_stability = true;

    /// Copy with every block sized for k covariates and q factors. Throws on
    /// mismatched or non-SPD blocks.
    [[nodiscard]] PriorSpec resolved(Eigen::Index k, int q) const;
};

struct SamplerConfig {
    long iterations = 100000;
    long burn_in = 20000;
    long thin = 1;
    double rho_step = 0.05;
    double adapt_low = 0.40;
    double adapt_high = 0.60;
    long adapt_window = 100;
    double adapt_factor = 1.1;
    std::uint64_t seed = 1;
    /// Cap on stored n x T snapshots of Lambda*f_t.
    long max_field_draws = 1000;
    int stability_retries = 1000;
    double floor = 1e-12;

    void validate() const;
};

/// Log-squared data with the lagged and spatially lagged blocks precomputed.
struct ModelData {
    Eigen::Index units = 0;
    Eigen::Index periods = 0;
    Eigen::Index covariates = 0;
    Eigen::MatrixXd ystar;    // Y*_t, n x T
    Eigen::MatrixXd lag;      // Y*_{t-1}
    Eigen::MatrixXd m_ystar;  // M Y*_t
    Eigen::MatrixXd m_lag;    // M Y*_{t-1}
    /// Row t*n + i holds x_t(s_i)'.
    Eigen::MatrixXd x;
    WeightMatrix weights;
    std::size_t floored_cells = 0;

    static ModelData build(const LogSquaredPanel& transformed, const std::vector<Eigen::MatrixXd>& x,
                           const WeightMatrix& weights);
    static ModelData build(const PanelData& panel, const WeightMatrix& weights, double floor = 1e-12);

    /// X_t beta for every t as an n x T matrix.
    [[nodiscard]] Eigen::MatrixXd covariate_effect(const Eigen::VectorXd& beta) const;
};

/// One Gibbs state. Mixture indicators are 0-based.
struct ChainState {
    Eigen::MatrixXi z;
    Eigen::VectorXd beta;
    Eigen::MatrixXd lambda;   // n x q
    Eigen::MatrixXd factors;  // q x T
    double gamma = 0.0;
    double delta = 0.0;
    double rho = 0.0;
    /// mu_{Z} and sigma^2_{Z} per cell; kept in sync with z by refresh_mixture().
    Eigen::MatrixXd mix_mean;
    Eigen::MatrixXd mix_var;

    void refresh_mixture(const MixtureTable& table = mixture_table());
    [[nodiscard]] Eigen::MatrixXd common() const;
    [[nodiscard]] int factor_count() const { return static_cast<int>(lambda.cols()); }
};

/// Prior-centred starting state: beta = 0, phi = 0, rho = 0, Lambda rows = b_lambda,
/// F = 0, Z drawn from the prior component probabilities.
ChainState initial_state(const ModelData& data, const PriorSpec& prior, int q, Rng& rng);

/// Conditional log-likelihood of Y*_1..T given Y*_0 with explicit mixture moments.
double log_likelihood(const ModelData& data, double rho, double gamma, double delta,
                      const Eigen::VectorXd& beta, const Eigen::MatrixXd& common,
                      const Eigen::MatrixXd& mix_mean, const Eigen::MatrixXd& mix_var);

double log_likelihood(const ModelData& data, const ChainState& state);

void sample_z(ChainState& state, const ModelData& data, Rng& rng, const MixtureTable& table = mixture_table());
void sample_beta(ChainState& state, const ModelData& data, const PriorSpec& prior, Rng& rng);
void sample_factors(ChainState& state, const ModelData& data, Rng& rng);
void sample_loadings(ChainState& state, const ModelData& data, const PriorSpec& prior, Rng& rng);
void sample_phi(ChainState& state, const ModelData& data, const PriorSpec& prior, Rng& rng,
                int stability_retries = 1000);

/// log of the MH ratio for moving rho to `candidate` with every other block fixed.
/// Returns -infinity outside the prior support.
double rho_log_acceptance(const ChainState& state, const ModelData& data, const PriorSpec& prior,
                          double candidate);

/// Random-walk MH update of rho with step `step`. Returns whether the move was accepted.
bool sample_rho_mh(ChainState& state, const ModelData& data, const PriorSpec& prior, double step, Rng& rng);

/// Draws N(P^{-1} b, P^{-1}) from a precision matrix P without forming the inverse.
Eigen::VectorXd draw_from_precision(const Eigen::MatrixXd& precision, const Eigen::VectorXd& shift, Rng& rng);

/// Standard sampler with q factors (q = 0 drops the factor blocks).
PosteriorDraws run_chain(const PanelData& panel, const WeightMatrix& weights, const PriorSpec& prior,
                         const SamplerConfig& cfg, int q);
PosteriorDraws run_chain(const ModelData& data, const PriorSpec& prior, const SamplerConfig& cfg, int q);

}  // namespace logarch
