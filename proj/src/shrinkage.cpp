#include "logarch/shrinkage.hpp"

#include "chain.hpp"

#include <cmath>

namespace logarch {

std::string to_string(Tau2Rule rule) {
    return rule == Tau2Rule::Conjugate ? "conjugate" : "inverse-gaussian";
}

Tau2Rule tau2_rule_from_string(const std::string& name) {
    if (name == "conjugate") return Tau2Rule::Conjugate;
    if (name == "inverse-gaussian") return Tau2Rule::InverseGaussian;
    throw Error("unknown tau2 rule '" + name + "' (expected conjugate or inverse-gaussian)");
}

Eigen::VectorXd sample_tau2(const Eigen::MatrixXd& lambda, double phi2_lasso, Rng& rng, Tau2Rule rule) {
    if (!(phi2_lasso > 0.0)) throw Error("sample_tau2: phi2 must be positive");
    const Eigen::Index q = lambda.cols();
    const double units = static_cast<double>(lambda.rows());
    Eigen::VectorXd tau2(q);
    for (Eigen::Index m = 0; m < q; ++m) {
        const double ss = lambda.col(m).squaredNorm();
        if (ss < kDegenerateLoadingNorm) {
            tau2(m) = rng.exponential(0.5 * phi2_lasso);
            continue;
        }
        if (rule == Tau2Rule::Conjugate) {
            tau2(m) = rng.generalized_inverse_gaussian(1.0 - 0.5 * units, phi2_lasso, ss);
        } else {
            tau2(m) = 1.0 / rng.inverse_gaussian(std::sqrt(ss / phi2_lasso), ss);
        }
    }
    return tau2;
}

double sample_phi2_lasso(const Eigen::VectorXd& tau2, double c, double d, Rng& rng) {
    if (!(c > 0.0) || !(d > 0.0)) throw Error("sample_phi2_lasso: c and d must be positive");
    if ((tau2.array() <= 0.0).any()) throw Error("sample_phi2_lasso: tau2 must be positive");
    const double shape = c + static_cast<double>(tau2.size());
    const double rate = d + 0.5 * tau2.sum();
    return rng.gamma_rate(shape, rate);
}

PosteriorDraws run_chain_shrinkage(const ModelData& data, const PriorSpec& prior, const SamplerConfig& cfg,
                                   int q_max, const ShrinkageSettings& settings) {
    return detail::run_gibbs(data, prior, cfg, q_max, &settings);
}

PosteriorDraws run_chain_shrinkage(const PanelData& panel, const WeightMatrix& weights, const PriorSpec& prior,
                                   const SamplerConfig& cfg, int q_max, const ShrinkageSettings& settings) {
    return run_chain_shrinkage(ModelData::build(panel, weights, cfg.floor), prior, cfg, q_max, settings);
}

}  // namespace logarch
