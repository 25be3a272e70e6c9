#include "logarch/simulate.hpp"

#include "logarch/rng.hpp"

#include <cmath>
#include <sstream>

namespace logarch {

SimConfig reference_design(Eigen::Index periods, std::uint64_t seed) {
    SimConfig cfg;
    cfg.periods = periods;
    cfg.seed = seed;
    cfg.weights = row_normalize(queen_contiguity(7, 7));
    return cfg;
}

Simulation simulate_panel(const SimConfig& cfg) {
    const WeightMatrix& w = cfg.weights;
    const Eigen::Index n = w.size();
    const Eigen::Index periods = cfg.periods;
    const Eigen::Index k = cfg.beta.size();
    const int q = cfg.factors;
    if (n < 1) throw Error("simulate_panel: empty weight matrix");
    if (periods < 1) throw Error("simulate_panel: need at least one period");
    if (q < 0) throw Error("simulate_panel: negative factor count");
    if (cfg.burn_in_periods < 0) throw Error("simulate_panel: negative burn-in");
    if (!(cfg.covariate_law.upper >= cfg.covariate_law.lower)) {
        throw Error("simulate_panel: covariate bounds are reversed");
    }

    const StabilityVerdict verdict = stability_check(cfg.params, w);
    if (!verdict.stable) {
        std::ostringstream msg;
        msg << "simulate_panel: unstable parameters, spectral radius of A = " << verdict.value;
        throw Error(msg.str());
    }

    const auto& p = cfg.params;
    const Eigen::MatrixXd& m = w.matrix();
    const Eigen::PartialPivLU<Eigen::MatrixXd> s_lu(build_s(w, p.rho));

    // One stream per ingredient: with zero loadings the panel does not depend on the factors.
    Rng covariate_rng = Rng::derive(cfg.seed, 1);
    Rng factor_rng = Rng::derive(cfg.seed, 2);
    Rng loading_rng = Rng::derive(cfg.seed, 3);
    Rng error_rng = Rng::derive(cfg.seed, 4);

    Simulation sim;
    SimTruth& truth = sim.truth;
    truth.params = p;
    truth.beta = cfg.beta;
    truth.loadings.resize(n, q);
    for (Eigen::Index j = 0; j < q; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) truth.loadings(i, j) = cfg.factor_law.loading_sd * loading_rng.normal();
    }
    truth.factors.resize(q, periods);
    truth.hstar.resize(n, periods);
    truth.epsstar.resize(n, periods);
    truth.ystar.resize(n, periods);

    PanelData& panel = sim.panel;
    panel.y.resize(n, periods);
    panel.y0.resize(n);
    if (k > 0) panel.x.assign(static_cast<std::size_t>(periods), Eigen::MatrixXd(n, k));

    const double width = cfg.covariate_law.upper - cfg.covariate_law.lower;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd eps(n), epsstar(n), f(q), ystar(n);
    Eigen::MatrixXd xt(n, k);
    panel.y0.setOnes();
    truth.ystar0 = Eigen::VectorXd::Zero(n);

    for (Eigen::Index step = -static_cast<Eigen::Index>(cfg.burn_in_periods) + 1; step <= periods; ++step) {
        for (Eigen::Index c = 0; c < k; ++c) {
            for (Eigen::Index i = 0; i < n; ++i) xt(i, c) = cfg.covariate_law.lower + width * covariate_rng.uniform();
        }
        for (Eigen::Index j = 0; j < q; ++j) f(j) = cfg.factor_law.factor_sd * factor_rng.normal();
        for (Eigen::Index i = 0; i < n; ++i) {
            eps(i) = error_rng.normal();
            epsstar(i) = std::log(eps(i) * eps(i));
        }
        const Eigen::VectorXd m_prev = m * prev;
        const Eigen::VectorXd common = truth.loadings * f;
        Eigen::VectorXd rhs = p.gamma * prev + p.delta * m_prev + common + epsstar;
        if (k > 0) rhs += xt * cfg.beta;
        ystar = s_lu.solve(rhs);

        if (step <= 0) {
            if (step == 0) {
                truth.ystar0 = ystar;
                for (Eigen::Index i = 0; i < n; ++i) {
                    panel.y0(i) = (eps(i) < 0.0 ? -1.0 : 1.0) * std::exp(0.5 * ystar(i));
                }
            }
            prev = ystar;
            continue;
        }
        const Eigen::Index t = step - 1;
        Eigen::VectorXd h = p.rho * (m * ystar) + p.gamma * prev + p.delta * m_prev + common;
        if (k > 0) {
            h += xt * cfg.beta;
            panel.x[static_cast<std::size_t>(t)] = xt;
        }
        truth.factors.col(t) = f;
        truth.hstar.col(t) = h;
        truth.epsstar.col(t) = epsstar;
        truth.ystar.col(t) = ystar;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sign = eps(i) < 0.0 ? -1.0 : 1.0;
            panel.y(i, t) = sign * std::exp(0.5 * ystar(i));
        }
        prev = ystar;
    }
    return sim;
}

}  // namespace logarch
