#include "logarch/sampler.hpp"

#include "chain.hpp"
#include "logarch/shrinkage.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace logarch {

namespace {

Eigen::MatrixXd checked_inverse_spd(const Eigen::MatrixXd& cov, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success || !cov.isApprox(cov.transpose(), 1e-10)) {
        throw Error(std::string("prior: ") + what + " covariance is not symmetric positive definite");
    }
    return llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
}

Eigen::VectorXd sized_mean(const Eigen::VectorXd& given, Eigen::Index size, const char* what, bool broadcast) {
    if (given.size() == 0) return Eigen::VectorXd::Zero(size);
    if (given.size() == size) return given;
    if (broadcast && given.size() == 1) return Eigen::VectorXd::Constant(size, given(0));
    throw Error(std::string("prior: ") + what + " mean has " + std::to_string(given.size()) +
                " entries, expected " + std::to_string(size));
}

Eigen::MatrixXd sized_cov(const Eigen::MatrixXd& given, Eigen::Index size, const char* what, bool broadcast) {
    if (given.size() == 0) return 100.0 * Eigen::MatrixXd::Identity(size, size);
    if (given.rows() == size && given.cols() == size) return given;
    if (broadcast && given.rows() == 1 && given.cols() == 1) {
        return given(0, 0) * Eigen::MatrixXd::Identity(size, size);
    }
    throw Error(std::string("prior: ") + what + " covariance has the wrong shape");
}

std::pair<double, double> rho_bounds(const PriorSpec& prior, const WeightMatrix& w) {
    auto [lo, hi] = w.rho_support();
    if (prior.rho_support) {
        lo = std::max(lo, prior.rho_support->first);
        hi = std::min(hi, prior.rho_support->second);
    }
    return {lo, hi};
}

// Likelihood as a function of rho alone: T log|S(rho)| - (A - 2 rho B + rho^2 C) / 2.
struct RhoTarget {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double periods = 0.0;
    const WeightMatrix* weights = nullptr;

    RhoTarget(const ChainState& s, const ModelData& d) : periods(static_cast<double>(d.periods)), weights(&d.weights) {
        const Eigen::MatrixXd mean = s.gamma * d.lag + s.delta * d.m_lag + d.covariate_effect(s.beta) +
                                     s.common() + s.mix_mean;
        const auto e0 = (d.ystar - mean).array();
        const auto e1 = d.m_ystar.array();
        const auto w = s.mix_var.array().inverse();
        a = (w * e0 * e0).sum();
        b = (w * e0 * e1).sum();
        c = (w * e1 * e1).sum();
    }

    [[nodiscard]] double operator()(double rho) const {
        return periods * log_abs_det_s_spectral(*weights, rho) - 0.5 * (a - 2.0 * rho * b + rho * rho * c);
    }
};

bool rho_admissible(const PriorSpec& prior, const ModelData& data, const ChainState& s, double rho) {
    const auto [lo, hi] = rho_bounds(prior, data.weights);
    if (!(rho > lo && rho < hi)) return false;
    if (prior.enforce_stability && !within_stability_bound(rho, s.gamma, s.delta)) return false;
    return true;
}

}  // namespace

PriorSpec PriorSpec::resolved(Eigen::Index k, int q) const {
    PriorSpec r = *this;
    r.beta_mean = sized_mean(beta_mean, k, "beta", false);
    r.beta_cov = sized_cov(beta_cov, k, "beta", false);
    r.lambda_mean = sized_mean(lambda_mean, q, "lambda", true);
    r.lambda_cov = sized_cov(lambda_cov, q, "lambda", true);
    checked_inverse_spd(r.phi_cov, "phi");
    if (k > 0) checked_inverse_spd(r.beta_cov, "beta");
    if (q > 0) checked_inverse_spd(r.lambda_cov, "lambda");
    if (rho_support && !(rho_support->first < rho_support->second)) {
        throw Error("prior: empty rho support");
    }
    return r;
}

void SamplerConfig::validate() const {
    if (iterations < 1) throw Error("sampler: iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations) throw Error("sampler: burn_in must lie in [0, iterations)");
    if (thin < 1) throw Error("sampler: thin must be positive");
    if (!(rho_step > 0.0)) throw Error("sampler: rho step must be positive");
    if (!(adapt_low < adapt_high)) throw Error("sampler: empty adaptation band");
    if (adapt_window < 1) throw Error("sampler: adaptation window must be positive");
    if (!(adapt_factor > 1.0)) throw Error("sampler: adaptation factor must exceed 1");
    if (max_field_draws < 1) throw Error("sampler: max_field_draws must be positive");
    if (!(floor > 0.0)) throw Error("sampler: floor must be positive");
}

ModelData ModelData::build(const LogSquaredPanel& transformed, const std::vector<Eigen::MatrixXd>& x,
                           const WeightMatrix& weights) {
    ModelData d;
    d.units = transformed.ystar.rows();
    d.periods = transformed.ystar.cols();
    if (weights.size() != d.units) {
        throw Error("model: weight matrix is " + std::to_string(weights.size()) + " x " +
                    std::to_string(weights.size()) + " but the panel has " + std::to_string(d.units) + " units");
    }
    if (transformed.ystar0.size() != d.units) throw Error("model: initial vector has the wrong length");
    if (!x.empty() && static_cast<Eigen::Index>(x.size()) != d.periods) {
        throw Error("model: covariate blocks do not match the number of periods");
    }
    if (!transformed.ystar.allFinite() || !transformed.ystar0.allFinite()) {
        throw Error("model: log-squared panel has non-finite entries");
    }
    d.covariates = x.empty() ? 0 : x.front().cols();
    d.ystar = transformed.ystar;
    d.lag.resize(d.units, d.periods);
    d.lag.col(0) = transformed.ystar0;
    if (d.periods > 1) d.lag.rightCols(d.periods - 1) = d.ystar.leftCols(d.periods - 1);
    d.m_ystar = weights.matrix() * d.ystar;
    d.m_lag = weights.matrix() * d.lag;
    d.x.resize(d.units * d.periods, d.covariates);
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(x.size()); ++t) {
        if (x[static_cast<std::size_t>(t)].rows() != d.units || x[static_cast<std::size_t>(t)].cols() != d.covariates) {
            throw Error("model: covariate block " + std::to_string(t + 1) + " has the wrong shape");
        }
        d.x.middleRows(t * d.units, d.units) = x[static_cast<std::size_t>(t)];
    }
    d.weights = weights;
    d.floored_cells = transformed.floored_cells;
    return d;
}

ModelData ModelData::build(const PanelData& panel, const WeightMatrix& weights, double floor) {
    return build(log_squared_transform(panel, floor), panel.x, weights);
}

Eigen::MatrixXd ModelData::covariate_effect(const Eigen::VectorXd& beta) const {
    if (covariates == 0) return Eigen::MatrixXd::Zero(units, periods);
    Eigen::VectorXd flat = x * beta;
    return Eigen::Map<const Eigen::MatrixXd>(flat.data(), units, periods);
}

void ChainState::refresh_mixture(const MixtureTable& table) {
    mix_mean.resize(z.rows(), z.cols());
    mix_var.resize(z.rows(), z.cols());
    for (Eigen::Index t = 0; t < z.cols(); ++t) {
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const auto j = static_cast<std::size_t>(z(i, t));
            mix_mean(i, t) = table.mu[j];
            mix_var(i, t) = table.sigma2[j];
        }
    }
}

Eigen::MatrixXd ChainState::common() const {
    if (lambda.cols() == 0) return Eigen::MatrixXd::Zero(z.rows(), z.cols());
    return lambda * factors;
}

ChainState initial_state(const ModelData& data, const PriorSpec& prior_in, int q, Rng& rng) {
    const PriorSpec prior = prior_in.resolved(data.covariates, q);
    ChainState s;
    s.beta = Eigen::VectorXd::Zero(data.covariates);
    s.lambda = prior.lambda_mean.transpose().replicate(data.units, 1);
    s.factors = Eigen::MatrixXd::Zero(q, data.periods);
    s.z.resize(data.units, data.periods);
    const auto& table = mixture_table();
    std::array<double, kMixtureComponents> logp{};
    for (std::size_t j = 0; j < kMixtureComponents; ++j) logp[j] = std::log(table.p[j]);
    for (Eigen::Index t = 0; t < data.periods; ++t) {
        for (Eigen::Index i = 0; i < data.units; ++i) s.z(i, t) = static_cast<int>(rng.categorical_log(logp));
    }
    s.refresh_mixture(table);
    return s;
}

double log_likelihood(const ModelData& data, double rho, double gamma, double delta, const Eigen::VectorXd& beta,
                      const Eigen::MatrixXd& common, const Eigen::MatrixXd& mix_mean,
                      const Eigen::MatrixXd& mix_var) {
    const double n = static_cast<double>(data.units);
    const double periods = static_cast<double>(data.periods);
    const double logdet = log_abs_det_s_spectral(data.weights, rho);
    const Eigen::MatrixXd resid = data.ystar - rho * data.m_ystar - gamma * data.lag - delta * data.m_lag -
                                  data.covariate_effect(beta) - common - mix_mean;
    const double quad = (resid.array().square() / mix_var.array()).sum();
    const double logvar = mix_var.array().log().sum();
    return -0.5 * n * periods * std::log(2.0 * std::numbers::pi) + periods * logdet - 0.5 * logvar - 0.5 * quad;
}

double log_likelihood(const ModelData& data, const ChainState& s) {
    return log_likelihood(data, s.rho, s.gamma, s.delta, s.beta, s.common(), s.mix_mean, s.mix_var);
}

Eigen::VectorXd draw_from_precision(const Eigen::MatrixXd& precision, const Eigen::VectorXd& shift, Rng& rng) {
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "conditional precision is not positive definite (size " << precision.rows()
            << ", diagonal min " << precision.diagonal().minCoeff() << ")";
        throw Error(msg.str());
    }
    Eigen::VectorXd u = llt.matrixL().solve(shift);
    for (Eigen::Index j = 0; j < u.size(); ++j) u(j) += rng.normal();
    return llt.matrixU().solve(u);
}

void sample_z(ChainState& s, const ModelData& d, Rng& rng, const MixtureTable& table) {
    const Eigen::MatrixXd resid = d.ystar - s.rho * d.m_ystar - s.gamma * d.lag - s.delta * d.m_lag -
                                  d.covariate_effect(s.beta) - s.common();
    std::array<double, kMixtureComponents> base{};
    std::array<double, kMixtureComponents> precision{};
    for (std::size_t j = 0; j < kMixtureComponents; ++j) {
        base[j] = std::log(table.p[j]) - 0.5 * std::log(table.sigma2[j]);
        precision[j] = 1.0 / table.sigma2[j];
    }
    std::array<double, kMixtureComponents> lw{};
    for (Eigen::Index t = 0; t < resid.cols(); ++t) {
        for (Eigen::Index i = 0; i < resid.rows(); ++i) {
            const double r = resid(i, t);
            for (std::size_t j = 0; j < kMixtureComponents; ++j) {
                const double e = r - table.mu[j];
                lw[j] = base[j] - 0.5 * e * e * precision[j];
            }
            const auto j = rng.categorical_log(lw);
            s.z(i, t) = static_cast<int>(j);
            s.mix_mean(i, t) = table.mu[j];
            s.mix_var(i, t) = table.sigma2[j];
        }
    }
}

void sample_beta(ChainState& s, const ModelData& d, const PriorSpec& prior_in, Rng& rng) {
    if (d.covariates == 0) return;
    const PriorSpec prior = prior_in.resolved(d.covariates, s.factor_count());
    const Eigen::MatrixXd target = d.ystar - s.rho * d.m_ystar - s.gamma * d.lag - s.delta * d.m_lag - s.common() -
                                   s.mix_mean;
    const Eigen::Map<const Eigen::VectorXd> y(target.data(), target.size());
    const Eigen::Map<const Eigen::VectorXd> var(s.mix_var.data(), s.mix_var.size());
    const Eigen::MatrixXd weighted = var.cwiseInverse().asDiagonal() * d.x;
    const Eigen::MatrixXd prior_precision = checked_inverse_spd(prior.beta_cov, "beta");
    const Eigen::MatrixXd precision = prior_precision + d.x.transpose() * weighted;
    const Eigen::VectorXd shift = prior_precision * prior.beta_mean + weighted.transpose() * y;
    s.beta = draw_from_precision(precision, shift, rng);
}

namespace {

// Y*_t with everything but the factor term removed.
Eigen::MatrixXd factor_target(const ChainState& s, const ModelData& d) {
    return d.ystar - s.rho * d.m_ystar - s.gamma * d.lag - s.delta * d.m_lag - d.covariate_effect(s.beta) -
           s.mix_mean;
}

void draw_loadings(ChainState& s, const ModelData& d, const Eigen::MatrixXd& prior_precision,
                   const Eigen::VectorXd& prior_shift, Rng& rng) {
    const Eigen::MatrixXd target = factor_target(s, d);
    const Eigen::MatrixXd& f = s.factors;
    for (Eigen::Index i = 0; i < d.units; ++i) {
        const Eigen::RowVectorXd w = s.mix_var.row(i).cwiseInverse();
        const Eigen::MatrixXd fw = f * w.asDiagonal();
        Eigen::MatrixXd precision = prior_precision;
        precision.noalias() += fw * f.transpose();
        Eigen::VectorXd shift = prior_shift;
        shift.noalias() += fw * target.row(i).transpose();
        s.lambda.row(i) = draw_from_precision(precision, shift, rng).transpose();
    }
}

}  // namespace

void sample_factors(ChainState& s, const ModelData& d, Rng& rng) {
    const Eigen::Index q = s.lambda.cols();
    if (q == 0) return;
    const Eigen::MatrixXd target = factor_target(s, d);
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(q, q);
    for (Eigen::Index t = 0; t < d.periods; ++t) {
        const Eigen::VectorXd w = s.mix_var.col(t).cwiseInverse();
        const Eigen::MatrixXd lw = w.asDiagonal() * s.lambda;
        Eigen::MatrixXd precision = identity;
        precision.noalias() += s.lambda.transpose() * lw;
        const Eigen::VectorXd shift = lw.transpose() * target.col(t);
        s.factors.col(t) = draw_from_precision(precision, shift, rng);
    }
}

void sample_loadings(ChainState& s, const ModelData& d, const PriorSpec& prior_in, Rng& rng) {
    const int q = s.factor_count();
    if (q == 0) return;
    const PriorSpec prior = prior_in.resolved(d.covariates, q);
    const Eigen::MatrixXd prior_precision = checked_inverse_spd(prior.lambda_cov, "lambda");
    draw_loadings(s, d, prior_precision, prior_precision * prior.lambda_mean, rng);
}

void sample_loadings_shrunk(ChainState& s, const ModelData& d, const Eigen::VectorXd& tau2, Rng& rng) {
    const int q = s.factor_count();
    if (q == 0) return;
    if (tau2.size() != q || !(tau2.array() > 0.0).all()) {
        throw Error("sample_loadings_shrunk: tau2 must hold q positive entries");
    }
    const Eigen::MatrixXd prior_precision = tau2.cwiseInverse().asDiagonal();
    draw_loadings(s, d, prior_precision, Eigen::VectorXd::Zero(q), rng);
}

void sample_phi(ChainState& s, const ModelData& d, const PriorSpec& prior, Rng& rng, int stability_retries) {
    const Eigen::MatrixXd target = d.ystar - s.rho * d.m_ystar - d.covariate_effect(s.beta) - s.common() -
                                   s.mix_mean;
    const auto w = s.mix_var.array().inverse();
    const auto l = d.lag.array();
    const auto ml = d.m_lag.array();
    const auto y = target.array();
    Eigen::Matrix2d data_precision;
    data_precision(0, 0) = (w * l * l).sum();
    data_precision(0, 1) = (w * l * ml).sum();
    data_precision(1, 0) = data_precision(0, 1);
    data_precision(1, 1) = (w * ml * ml).sum();
    Eigen::Vector2d data_shift((w * l * y).sum(), (w * ml * y).sum());

    const Eigen::Matrix2d prior_precision = checked_inverse_spd(prior.phi_cov, "phi");
    const Eigen::MatrixXd precision = prior_precision + data_precision;
    const Eigen::VectorXd shift = prior_precision * prior.phi_mean + data_shift;

    // Truncation to the stability region by rejection keeps the conditional exact.
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) throw Error("sample_phi: conditional precision is not positive definite");
    const Eigen::VectorXd mean = llt.solve(shift);
    const int budget = prior.enforce_stability ? std::max(stability_retries, 1) : 1;
    for (int attempt = 0; attempt < budget; ++attempt) {
        Eigen::VectorXd z(2);
        z << rng.normal(), rng.normal();
        const Eigen::VectorXd draw = mean + llt.matrixU().solve(z);
        if (!prior.enforce_stability || within_stability_bound(s.rho, draw(0), draw(1))) {
            s.gamma = draw(0);
            s.delta = draw(1);
            return;
        }
    }
    std::ostringstream msg;
    msg << "sample_phi: stability rejection budget of " << budget << " exhausted (rho = " << s.rho
        << ", conditional mean = (" << mean(0) << ", " << mean(1) << "))";
    throw Error(msg.str());
}

double rho_log_acceptance(const ChainState& s, const ModelData& d, const PriorSpec& prior, double candidate) {
    if (!rho_admissible(prior, d, s, candidate)) return -std::numeric_limits<double>::infinity();
    const RhoTarget target(s, d);
    return target(candidate) - target(s.rho);
}

bool sample_rho_mh(ChainState& s, const ModelData& d, const PriorSpec& prior, double step, Rng& rng) {
    const double candidate = s.rho + step * rng.normal();
    const double u = rng.uniform();
    if (!rho_admissible(prior, d, s, candidate)) return false;
    const RhoTarget target(s, d);
    const double log_ratio = target(candidate) - target(s.rho);
    if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
        s.rho = candidate;
        return true;
    }
    return false;
}

namespace detail {

PosteriorDraws run_gibbs(const ModelData& d, const PriorSpec& prior_in, const SamplerConfig& cfg, int q,
                         const ShrinkageSettings* shrink) {
    cfg.validate();
    if (q < 0) throw Error("sampler: negative factor count");
    const auto started = std::chrono::steady_clock::now();
    const PriorSpec prior = prior_in.resolved(d.covariates, q);
    if (shrink && !(shrink->c > 0.0 && shrink->d > 0.0)) throw Error("shrinkage: c and d must be positive");

    Rng rng(cfg.seed);
    ChainState s = initial_state(d, prior, q, rng);
    ShrinkageState lasso;
    if (shrink) {
        s.lambda.setZero();
        lasso.tau2 = Eigen::VectorXd::Ones(q);
        lasso.phi2_lasso = 1.0;
    }

    const long retained_total = (cfg.iterations - cfg.burn_in + cfg.thin - 1) / cfg.thin;
    const long field_stride = std::max<long>(1, (retained_total + cfg.max_field_draws - 1) / cfg.max_field_draws);

    PosteriorDraws out;
    out.units = d.units;
    out.periods = d.periods;
    out.covariates = d.covariates;
    out.factors = q;
    out.iteration.reserve(static_cast<std::size_t>(retained_total));
    out.rho.reserve(static_cast<std::size_t>(retained_total));
    out.gamma.reserve(static_cast<std::size_t>(retained_total));
    out.delta.reserve(static_cast<std::size_t>(retained_total));
    out.loglik.reserve(static_cast<std::size_t>(retained_total));
    out.beta.reserve(static_cast<std::size_t>(retained_total));
    out.mean_common = Eigen::MatrixXd::Zero(d.units, d.periods);
    out.mean_mix_mean = Eigen::MatrixXd::Zero(d.units, d.periods);
    out.mean_mix_var = Eigen::MatrixXd::Zero(d.units, d.periods);

    double step = cfg.rho_step;
    long window_accepts = 0;
    long window_count = 0;
    long burn_accepts = 0;
    long post_accepts = 0;

    for (long it = 0; it < cfg.iterations; ++it) {
        sample_z(s, d, rng);
        sample_beta(s, d, prior, rng);
        if (q > 0) {
            sample_factors(s, d, rng);
            if (shrink) {
                sample_loadings_shrunk(s, d, lasso.tau2, rng);
                lasso.tau2 = sample_tau2(s.lambda, lasso.phi2_lasso, rng, shrink->rule);
                lasso.phi2_lasso = sample_phi2_lasso(lasso.tau2, shrink->c, shrink->d, rng);
            } else {
                sample_loadings(s, d, prior, rng);
            }
        }
        sample_phi(s, d, prior, rng, cfg.stability_retries);
        const bool accepted = sample_rho_mh(s, d, prior, step, rng);

        if (it < cfg.burn_in) {
            burn_accepts += accepted;
            window_accepts += accepted;
            if (++window_count == cfg.adapt_window) {
                const double rate = static_cast<double>(window_accepts) / static_cast<double>(window_count);
                if (rate > cfg.adapt_high) step *= cfg.adapt_factor;
                else if (rate < cfg.adapt_low) step /= cfg.adapt_factor;
                window_accepts = 0;
                window_count = 0;
            }
            continue;
        }
        post_accepts += accepted;
        if ((it - cfg.burn_in) % cfg.thin != 0) continue;

        const Eigen::MatrixXd common = s.common();
        const double ll = log_likelihood(d, s.rho, s.gamma, s.delta, s.beta, common, s.mix_mean, s.mix_var);
        if (!std::isfinite(ll) || !std::isfinite(s.rho) || !std::isfinite(s.gamma) || !std::isfinite(s.delta) ||
            !s.beta.allFinite() || !common.allFinite()) {
            throw Error("sampler: non-finite draw at iteration " + std::to_string(it));
        }
        const std::size_t index = out.rho.size();
        out.iteration.push_back(it);
        out.rho.push_back(s.rho);
        out.gamma.push_back(s.gamma);
        out.delta.push_back(s.delta);
        out.beta.push_back(s.beta);
        out.loglik.push_back(ll);
        if (shrink) {
            out.tau2.push_back(lasso.tau2);
            out.phi2.push_back(lasso.phi2_lasso);
        }
        out.mean_common += common;
        out.mean_mix_mean += s.mix_mean;
        out.mean_mix_var += s.mix_var;
        if (static_cast<long>(index) % field_stride == 0) {
            out.field_draw.push_back(index);
            out.common.push_back(common);
        }
    }

    const double kept = static_cast<double>(out.size());
    out.mean_common /= kept;
    out.mean_mix_mean /= kept;
    out.mean_mix_var /= kept;

    RunManifest& man = out.manifest;
    man.seed = cfg.seed;
    man.factors = q;
    man.shrinkage = shrink != nullptr;
    man.tau2_rule = shrink ? to_string(shrink->rule) : "";
    man.iterations = cfg.iterations;
    man.burn_in = cfg.burn_in;
    man.thin = cfg.thin;
    man.rho_step_initial = cfg.rho_step;
    man.rho_step_final = step;
    man.acceptance_burn_in = cfg.burn_in ? static_cast<double>(burn_accepts) / static_cast<double>(cfg.burn_in) : 0.0;
    man.acceptance_rate = static_cast<double>(post_accepts) / static_cast<double>(cfg.iterations - cfg.burn_in);
    man.floored_cells = d.floored_cells;
    man.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

}  // namespace detail

PosteriorDraws run_chain(const ModelData& data, const PriorSpec& prior, const SamplerConfig& cfg, int q) {
    return detail::run_gibbs(data, prior, cfg, q, nullptr);
}

PosteriorDraws run_chain(const PanelData& panel, const WeightMatrix& weights, const PriorSpec& prior,
                         const SamplerConfig& cfg, int q) {
    return run_chain(ModelData::build(panel, weights, cfg.floor), prior, cfg, q);
}

}  // namespace logarch
