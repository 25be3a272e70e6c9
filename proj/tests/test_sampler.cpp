#include "oracles.hpp"

#include "logarch/inference.hpp"
#include "logarch/mixture.hpp"
#include "logarch/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace logarch;

namespace {

double normal_logpdf(double x, double mean, double var) {
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * (x - mean) * (x - mean) / var;
}

// One-period model with unit-free structure: Y*_1 = x beta + eps, M of two units.
struct Scalar {
    ModelData data;
    ChainState state;
};

Scalar single_cell(double y, double x, int z) {
    LogSquaredPanel p;
    p.ystar = Eigen::MatrixXd::Constant(1, 1, y);
    p.ystar0 = Eigen::VectorXd::Zero(1);
    Scalar s;
    s.data = ModelData::build(p, {Eigen::MatrixXd::Constant(1, 1, x)}, WeightMatrix(Eigen::MatrixXd::Zero(1, 1)));
    s.state.beta = Eigen::VectorXd::Zero(1);
    s.state.lambda.resize(1, 0);
    s.state.factors.resize(0, 1);
    s.state.z = Eigen::MatrixXi::Constant(1, 1, z);
    s.state.refresh_mixture();
    return s;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("log-likelihood with two independent cells") {
    ModelData d = oracle::tiny_data(2, 1, 1, 3);
    ChainState s = oracle::tiny_state(d, 1, 4);
    s.rho = 0.0;
    const auto& tab = mixture_table();
    double expected = 0.0;
    for (Eigen::Index i = 0; i < 2; ++i) {
        const double mean = s.gamma * d.lag(i, 0) + s.delta * d.m_lag(i, 0) + d.x(i, 0) * s.beta(0) +
                            (s.lambda.row(i) * s.factors.col(0))(0) + tab.mu[static_cast<std::size_t>(s.z(i, 0))];
        expected += normal_logpdf(d.ystar(i, 0), mean, tab.sigma2[static_cast<std::size_t>(s.z(i, 0))]);
    }
    CHECK(log_likelihood(d, s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log-likelihood matches a dense multivariate normal evaluation") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const ModelData d = oracle::tiny_data(3, 2, 2, seed);
        ChainState s = oracle::tiny_state(d, 2, seed + 10);
        s.rho = 0.2;
        CHECK(log_likelihood(d, s) == doctest::Approx(oracle::dense_log_likelihood(d, s)).epsilon(1e-10));
        s.rho = -0.7;
        CHECK(log_likelihood(d, s) == doctest::Approx(oracle::dense_log_likelihood(d, s)).epsilon(1e-10));
    }
}

TEST_CASE("scaling every mixture variance by four") {
    const ModelData d = oracle::tiny_data(3, 2, 1, 5);
    const ChainState s = oracle::tiny_state(d, 1, 6);
    const double base = log_likelihood(d, s.rho, s.gamma, s.delta, s.beta, s.common(), s.mix_mean, s.mix_var);
    const double scaled =
        log_likelihood(d, s.rho, s.gamma, s.delta, s.beta, s.common(), s.mix_mean, 4.0 * s.mix_var);
    // base = C - logvar/2 - quad/2 ; scaled = C - logvar/2 - (nT/2) log 4 - quad/8.
    const Eigen::MatrixXd resid = d.ystar - s.rho * d.m_ystar - s.gamma * d.lag - s.delta * d.m_lag -
                                  d.covariate_effect(s.beta) - s.common() - s.mix_mean;
    const double quad = (resid.array().square() / s.mix_var.array()).sum();
    const double cells = static_cast<double>(d.units * d.periods);
    CHECK(scaled - base == doctest::Approx(-0.5 * cells * std::log(4.0) + 0.5 * quad - 0.125 * quad).epsilon(1e-12));
}

TEST_CASE("indicator step matches the ten-point posterior") {
    CHECK(oracle::check_indicators_min_p(100'000, 21) > 1e-3);
    const auto w = oracle::indicator_posterior(1.92677);
    CHECK(w[0] > w[9]);
}

TEST_CASE("beta step matches the stacked regression posterior") {
    CHECK(oracle::check_beta(100'000, 31) < 3.0);
}

TEST_CASE("beta step with one cell and a flat prior returns y / x") {
    Scalar c = single_cell(2.0, 0.5, 4);
    PriorSpec prior;
    prior.beta_cov = Eigen::MatrixXd::Constant(1, 1, 1e12);
    const auto& tab = mixture_table();
    const double expected = (2.0 - tab.mu[4]) / 0.5;
    Rng rng(1);
    double acc = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        sample_beta(c.state, c.data, prior, rng);
        acc += c.state.beta(0);
    }
    const double sd = std::sqrt(tab.sigma2[4]) / 0.5;
    CHECK(std::abs(acc / n - expected) < 3.0 * sd / std::sqrt(n));

    prior.beta_mean = Eigen::VectorXd::Constant(1, -1.5);
    prior.beta_cov = Eigen::MatrixXd::Constant(1, 1, 1e-12);
    sample_beta(c.state, c.data, prior, rng);
    CHECK(c.state.beta(0) == doctest::Approx(-1.5).epsilon(1e-5));
}

TEST_CASE("beta posterior mean equals weighted least squares on four cells") {
    const ModelData d = oracle::tiny_data(2, 2, 1, 41);
    ChainState s = oracle::tiny_state(d, 1, 42);
    PriorSpec prior;
    prior.beta_cov = Eigen::MatrixXd::Constant(1, 1, 1e10);
    const Eigen::MatrixXd target = d.ystar - s.rho * d.m_ystar - s.gamma * d.lag - s.delta * d.m_lag -
                                   s.common() - s.mix_mean;
    double num = 0.0, den = 0.0;
    for (Eigen::Index t = 0; t < 2; ++t) {
        for (Eigen::Index i = 0; i < 2; ++i) {
            const double x = d.x(t * 2 + i, 0);
            num += x * target(i, t) / s.mix_var(i, t);
            den += x * x / s.mix_var(i, t);
        }
    }
    Rng rng(3);
    double acc = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        sample_beta(s, d, prior, rng);
        acc += s.beta(0);
    }
    CHECK(std::abs(acc / n - num / den) < 3.0 / std::sqrt(den * n));
}

TEST_CASE("factor step matches the per-period conditional") {
    CHECK(oracle::check_factors(100'000, 51) < 3.0);
}

TEST_CASE("factor step special cases") {
    const ModelData d = oracle::tiny_data(3, 2, 1, 52);
    ChainState s = oracle::tiny_state(d, 2, 53);
    s.lambda.setZero();
    Rng rng(4);
    std::vector<Eigen::VectorXd> draws;
    for (int i = 0; i < 50000; ++i) {
        sample_factors(s, d, rng);
        draws.push_back(s.factors.reshaped());
    }
    const oracle::Gaussian prior{Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4)};
    CHECK(oracle::compare_moments(draws, prior).max_z() < 3.0);

    // Scalar case: precision 1 + lambda^2 / sigma^2.
    const ModelData one = oracle::tiny_data(1, 1, 1, 54);
    ChainState c = oracle::tiny_state(one, 1, 55);
    c.lambda(0, 0) = 1.7;
    double mean_small = 0.0, mean_large = 0.0;
    for (int z : {0, 9}) {
        c.z(0, 0) = z;
        c.refresh_mixture();
        const double var = 1.0 / (1.0 + 1.7 * 1.7 / c.mix_var(0, 0));
        const auto target = oracle::factor_conditional(one, c, 0);
        CHECK(target.cov(0, 0) == doctest::Approx(var));
        double s1 = 0.0, s2 = 0.0;
        const int n = 50000;
        for (int i = 0; i < n; ++i) {
            sample_factors(c, one, rng);
            s1 += c.factors(0, 0);
            s2 += c.factors(0, 0) * c.factors(0, 0);
        }
        const double m = s1 / n;
        CHECK(s2 / n - m * m == doctest::Approx(var).epsilon(0.03));
        (z == 0 ? mean_small : mean_large) = std::abs(target.mean(0));
    }
    // Same residual scale, larger mixture variance: the mean is pulled toward zero.
    ChainState m1 = c;
    double prev = std::numeric_limits<double>::infinity();
    for (int z = 0; z < 10; ++z) {
        m1.z(0, 0) = z;
        m1.refresh_mixture();
        m1.mix_mean(0, 0) = 0.0;
        const double mean = std::abs(oracle::factor_conditional(one, m1, 0).mean(0));
        CHECK(mean <= prev);
        prev = mean;
    }
}

TEST_CASE("loading step matches the per-unit conditional") {
    CHECK(oracle::check_loadings(100'000, 61) < 3.0);
}

TEST_CASE("loading step with zero factors returns the prior") {
    const ModelData d = oracle::tiny_data(2, 3, 1, 62);
    ChainState s = oracle::tiny_state(d, 1, 63);
    s.factors.setZero();
    PriorSpec prior;
    prior.lambda_mean = Eigen::VectorXd::Constant(1, 0.7);
    prior.lambda_cov = Eigen::MatrixXd::Constant(1, 1, 0.3);
    Rng rng(5);
    std::vector<Eigen::VectorXd> draws;
    for (int i = 0; i < 50000; ++i) {
        sample_loadings(s, d, prior, rng);
        draws.push_back(s.lambda.reshaped());
    }
    const oracle::Gaussian target{Eigen::VectorXd::Constant(2, 0.7), 0.3 * Eigen::MatrixXd::Identity(2, 2)};
    CHECK(oracle::compare_moments(draws, target).max_z() < 3.0);
}

TEST_CASE("loading posterior variance shrinks with the panel length") {
    double prev = std::numeric_limits<double>::infinity();
    for (int periods : {25, 100, 400}) {
        SimConfig cfg = reference_design(periods, 9);
        const auto sim = simulate_panel(cfg);
        const ModelData d = ModelData::build(sim.panel, cfg.weights);
        ChainState s;
        s.beta = sim.truth.beta;
        s.lambda = sim.truth.loadings;
        s.factors = sim.truth.factors;
        s.rho = 0.16;
        s.gamma = 0.15;
        s.delta = 0.2;
        s.z = Eigen::MatrixXi::Constant(d.units, d.periods, 4);
        s.refresh_mixture();
        const auto g = oracle::loading_conditional(d, s, 0, Eigen::VectorXd::Zero(2), 100.0 * Eigen::MatrixXd::Identity(2, 2));
        const double v = g.cov.trace();
        CHECK(v < prev);
        CHECK(v * periods == doctest::Approx(2.0 * mixture_table().sigma2[4]).epsilon(0.5));
        prev = v;
    }
}

TEST_CASE("phi step matches the stacked regression posterior") {
    CHECK(oracle::check_phi(100'000, 71) < 3.0);
}

TEST_CASE("phi step respects the stability truncation") {
    const ModelData d = oracle::tiny_data(3, 2, 1, 72);
    ChainState s = oracle::tiny_state(d, 1, 73);
    s.rho = 0.6;
    PriorSpec prior;
    prior.phi_mean = Eigen::Vector2d(0.3, 0.3);
    prior.phi_cov = 0.05 * Eigen::Matrix2d::Identity();
    Rng rng(6);
    for (int i = 0; i < 2000; ++i) {
        sample_phi(s, d, prior, rng);
        REQUIRE(within_stability_bound(s.rho, s.gamma, s.delta));
    }
    s.rho = 0.999;
    prior.phi_mean = Eigen::Vector2d(5.0, 5.0);
    prior.phi_cov = 1e-6 * Eigen::Matrix2d::Identity();
    CHECK_THROWS_AS(sample_phi(s, d, prior, rng, 20), Error);
}

TEST_CASE("phi posterior mean reduces to generalized least squares under a flat prior") {
    const ModelData d = oracle::tiny_data(2, 2, 1, 74);
    ChainState s = oracle::tiny_state(d, 1, 75);
    PriorSpec prior;
    prior.phi_cov = 1e10 * Eigen::Matrix2d::Identity();
    prior.enforce_stability = false;
    Eigen::MatrixXd w(4, 2);
    Eigen::VectorXd y(4), v(4);
    const Eigen::MatrixXd target = d.ystar - s.rho * d.m_ystar - d.covariate_effect(s.beta) - s.common() - s.mix_mean;
    for (Eigen::Index t = 0; t < 2; ++t) {
        for (Eigen::Index i = 0; i < 2; ++i) {
            w.row(t * 2 + i) << d.lag(i, t), d.m_lag(i, t);
            y(t * 2 + i) = target(i, t);
            v(t * 2 + i) = s.mix_var(i, t);
        }
    }
    const Eigen::MatrixXd vi = v.cwiseInverse().asDiagonal();
    const Eigen::Vector2d gls = (w.transpose() * vi * w).ldlt().solve(w.transpose() * vi * y);
    const auto g = oracle::phi_conditional(d, s, prior);
    CHECK((g.mean - gls).norm() < 1e-6);
}

TEST_CASE("rho acceptance ratio") {
    const ModelData d = oracle::tiny_data(3, 2, 1, 81);
    ChainState s = oracle::tiny_state(d, 1, 82);
    const PriorSpec prior;
    CHECK(rho_log_acceptance(s, d, prior, s.rho) == 0.0);
    CHECK(rho_log_acceptance(s, d, prior, 1.0) == -std::numeric_limits<double>::infinity());
    // Candidate inside the support but outside the stability region.
    CHECK(rho_log_acceptance(s, d, prior, 0.8) == -std::numeric_limits<double>::infinity());
    ChainState moved = s;
    moved.rho = 0.4;
    CHECK(rho_log_acceptance(s, d, prior, 0.4) ==
          doctest::Approx(oracle::dense_log_likelihood(d, moved) - oracle::dense_log_likelihood(d, s)).epsilon(1e-10));
}

TEST_CASE("rho chain matches the quadrature of its conditional") {
    CHECK(oracle::rho_total_variation(1'000'000, 20, 0.3, 91) < 0.02);
}

TEST_CASE("chain determinism, support and retained counts") {
    SimConfig cfg = reference_design(20, 5);
    const auto sim = simulate_panel(cfg);
    SamplerConfig sc;
    sc.iterations = 600;
    sc.burn_in = 200;
    sc.thin = 2;
    sc.seed = 77;
    sc.max_field_draws = 50;
    const auto a = run_chain(sim.panel, cfg.weights, PriorSpec{}, sc, 2);
    const auto b = run_chain(sim.panel, cfg.weights, PriorSpec{}, sc, 2);
    CHECK(a.size() == 200);
    CHECK(a.rho == b.rho);
    CHECK(a.loglik == b.loglik);
    CHECK(a.common.size() == 50);
    CHECK(a.common.back() == b.common.back());
    for (std::size_t g = 0; g < a.size(); ++g) {
        REQUIRE(a.rho[g] > -1.0);
        REQUIRE(a.rho[g] < 1.0);
        REQUIRE(within_stability_bound(a.rho[g], a.gamma[g], a.delta[g]));
    }
    CHECK(a.iteration.front() == 200);
    CHECK(a.manifest.seed == 77);
    CHECK_FALSE(a.has_shrinkage());

    sc.burn_in = 600;
    CHECK_THROWS_AS(run_chain(sim.panel, cfg.weights, PriorSpec{}, sc, 2), Error);
}

TEST_CASE("no-factor chain recovers the regression coefficient") {
    SimConfig cfg = reference_design(60, 12);
    cfg.params = {0.0, 0.0, 0.0};
    cfg.factors = 0;
    const auto sim = simulate_panel(cfg);
    SamplerConfig sc;
    sc.iterations = 3000;
    sc.burn_in = 1000;
    sc.seed = 3;
    const auto draws = run_chain(sim.panel, cfg.weights, PriorSpec{}, sc, 0);
    const auto beta = draws.parameter("beta_1");
    const auto s = summarize_trace("beta_1", beta);
    double var = 0.0;
    for (double b : beta) var += (b - s.mean) * (b - s.mean);
    const double sd = std::sqrt(var / static_cast<double>(beta.size()));
    CHECK(std::abs(s.median - (-2.0)) < 2.0 * sd);
    CHECK(draws.common.front().isZero());
}

TEST_CASE("prior resolution") {
    PriorSpec p;
    const auto r = p.resolved(2, 3);
    CHECK(r.beta_mean.size() == 2);
    CHECK(r.lambda_cov.isApprox(100.0 * Eigen::MatrixXd::Identity(3, 3)));
    p.lambda_cov = Eigen::MatrixXd::Constant(1, 1, 2.0);
    CHECK(p.resolved(0, 2).lambda_cov.isApprox(2.0 * Eigen::MatrixXd::Identity(2, 2)));
    p.beta_cov = (Eigen::Matrix2d() << 1, 2, 2, 1).finished();
    CHECK_THROWS_AS((void)p.resolved(2, 1), Error);
    PriorSpec bad;
    bad.rho_support = std::make_pair(0.5, 0.2);
    CHECK_THROWS_AS((void)bad.resolved(0, 0), Error);
}

}  // TEST_SUITE
