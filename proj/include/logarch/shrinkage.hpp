#pragma once

#include "logarch/sampler.hpp"

#include <string>

namespace logarch {

/// How the tau^2 conditional is drawn.
///  - Conjugate: tau^2_m | Lambda, phi^2 ~ GIG(1 - n/2, phi^2, sum_i lambda_m(s_i)^2), the exact
///    full conditional implied by lambda_m(s_i) | tau^2_m ~ N(0, tau^2_m) and tau^2_m ~ Exp(phi^2/2).
///  - InverseGaussian: 1/tau^2_m ~ InverseGaussian(mean sqrt(S_m/phi^2), shape S_m), S_m = sum_i lambda_m(s_i)^2.
enum class Tau2Rule { Conjugate, InverseGaussian };

std::string to_string(Tau2Rule rule);
Tau2Rule tau2_rule_from_string(const std::string& name);

struct ShrinkageSettings {
    /// Gamma(c, d) hyper-prior on phi^2, rate convention.
    double c = 1.0;
    double d = 1.0;
    Tau2Rule rule = Tau2Rule::Conjugate;
};

struct ShrinkageState {
    Eigen::VectorXd tau2;
    double phi2_lasso = 1.0;
};

/// Loading columns with sum of squares below this are treated as degenerate.
inline constexpr double kDegenerateLoadingNorm = 1e-12;

/// lambda(s_i) ~ N(K b, K), K = (D_tau^{-1} + sum_t f_t f_t' / sigma^2)^{-1}, zero prior mean.
void sample_loadings_shrunk(ChainState& state, const ModelData& data, const Eigen::VectorXd& tau2, Rng& rng);

/// Redraws every tau^2_m. A degenerate column is redrawn from its Exp(phi^2/2) prior.
Eigen::VectorXd sample_tau2(const Eigen::MatrixXd& lambda, double phi2_lasso, Rng& rng,
                            Tau2Rule rule = Tau2Rule::Conjugate);

/// phi^2 ~ Gamma(c + q, rate d + sum_m tau^2_m / 2).
double sample_phi2_lasso(const Eigen::VectorXd& tau2, double c, double d, Rng& rng);

/// Standard sampler with the loading step replaced by the shrinkage steps.
PosteriorDraws run_chain_shrinkage(const PanelData& panel, const WeightMatrix& weights, const PriorSpec& prior,
                                   const SamplerConfig& cfg, int q_max,
                                   const ShrinkageSettings& settings = {});
PosteriorDraws run_chain_shrinkage(const ModelData& data, const PriorSpec& prior, const SamplerConfig& cfg,
                                   int q_max, const ShrinkageSettings& settings = {});

}  // namespace logarch
