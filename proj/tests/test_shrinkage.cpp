#include "oracles.hpp"

#include "logarch/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace logarch;

namespace {

double median_of(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

}  // namespace

TEST_SUITE("shrinkage") {

TEST_CASE("shrunk loading step matches its conditional") {
    CHECK(oracle::check_loadings_shrunk(100'000, 11) < 3.0);
}

TEST_CASE("tiny tau2 pins a loading column at zero") {
    const ModelData d = oracle::tiny_data(3, 4, 1, 12);
    ChainState s = oracle::tiny_state(d, 2, 13);
    Rng rng(1);
    sample_loadings_shrunk(s, d, Eigen::Vector2d(1e-14, 1.0), rng);
    CHECK(s.lambda.col(0).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(s.lambda.col(1).cwiseAbs().maxCoeff() > 1e-3);
    CHECK_THROWS_AS(sample_loadings_shrunk(s, d, Eigen::Vector2d(0.0, 1.0), rng), Error);
}

TEST_CASE("huge tau2 reproduces the flat-prior loading step") {
    const ModelData d = oracle::tiny_data(3, 4, 1, 14);
    ChainState s = oracle::tiny_state(d, 1, 15);
    const auto flat = oracle::loading_conditional(d, s, 1, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 1e12));
    Rng rng(2);
    double acc = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        sample_loadings_shrunk(s, d, Eigen::VectorXd::Constant(1, 1e12), rng);
        acc += s.lambda(1, 0);
    }
    CHECK(std::abs(acc / n - flat.mean(0)) < 3.0 * std::sqrt(flat.cov(0, 0) / n));
}

TEST_CASE("scalar shrunk loading update matches the conjugate formula") {
    const ModelData d = oracle::tiny_data(1, 3, 1, 16);
    ChainState s = oracle::tiny_state(d, 1, 17);
    const double tau2 = 0.7;
    const auto target = oracle::loading_conditional(d, s, 0, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, tau2));
    double prec = 1.0 / tau2;
    for (Eigen::Index t = 0; t < 3; ++t) prec += s.factors(0, t) * s.factors(0, t) / s.mix_var(0, t);
    CHECK(target.cov(0, 0) == doctest::Approx(1.0 / prec));
}

TEST_CASE("tau2 draws are positive and grow with the loading norm") {
    Rng rng(3);
    for (auto rule : {Tau2Rule::Conjugate, Tau2Rule::InverseGaussian}) {
        CAPTURE(to_string(rule));
        Eigen::MatrixXd lambda(10, 2);
        lambda.col(0).setConstant(0.1);
        lambda.col(1).setConstant(1.0);
        std::vector<double> small, large;
        for (int i = 0; i < 20000; ++i) {
            const auto t = sample_tau2(lambda, 1.0, rng, rule);
            REQUIRE((t.array() > 0.0).all());
            small.push_back(t(0));
            large.push_back(t(1));
        }
        const double ms = median_of(small);
        const double ml = median_of(large);
        if (rule == Tau2Rule::Conjugate) {
            CHECK(ml > ms);
        } else {
            // The inverse Gaussian rule moves the other way.
            CHECK(ml < ms);
        }
    }
}

TEST_CASE("tau2 is exchangeable across loading columns") {
    Eigen::MatrixXd lambda(5, 2);
    lambda << 0.1, 2.0, -0.3, 1.0, 0.2, -1.5, 0.0, 0.4, 0.5, 0.9;
    Eigen::MatrixXd swapped = lambda.rowwise().reverse();
    Rng a(4), b(5);
    std::vector<double> first, second;
    for (int i = 0; i < 40000; ++i) {
        first.push_back(sample_tau2(lambda, 2.0, a)(0));
        second.push_back(sample_tau2(swapped, 2.0, b)(1));
    }
    CHECK(median_of(first) == doctest::Approx(median_of(second)).epsilon(0.03));
}

TEST_CASE("degenerate loading column draws tau2 from its exponential prior") {
    Rng rng(6);
    const Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(4, 1);
    const double phi2 = 3.0;
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += sample_tau2(lambda, phi2, rng)(0);
    const double mean = 2.0 / phi2;
    CHECK(std::abs(acc / n - mean) < 3.0 * mean / std::sqrt(n));
}

TEST_CASE("phi2 draws follow the rate-parameterized gamma") {
    Rng rng(7);
    const int n = 100000;
    const Eigen::Vector3d tau2(0.5, 1.0, 2.5);
    const double shape = 1.0 + 3.0;
    const double rate = 1.0 + 0.5 * tau2.sum();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += sample_phi2_lasso(tau2, 1.0, 1.0, rng);
    CHECK(std::abs(acc / n - shape / rate) < 3.0 * std::sqrt(shape) / rate / std::sqrt(n));

    // With no factors the draw is the Gamma(c, d) prior.
    acc = 0.0;
    for (int i = 0; i < n; ++i) acc += sample_phi2_lasso(Eigen::VectorXd(), 2.0, 4.0, rng);
    CHECK(std::abs(acc / n - 0.5) < 3.0 * std::sqrt(2.0) / 4.0 / std::sqrt(n));

    // Larger total tau2 means a larger rate and smaller phi2.
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
        lo += sample_phi2_lasso(Eigen::Vector2d(0.1, 0.1), 1.0, 1.0, rng);
        hi += sample_phi2_lasso(Eigen::Vector2d(10.0, 10.0), 1.0, 1.0, rng);
    }
    CHECK(hi < lo);
    CHECK_THROWS_AS(sample_phi2_lasso(tau2, 0.0, 1.0, rng), Error);
}

TEST_CASE("normal-exponential mixture reproduces the Laplace density") {
    CHECK(oracle::laplace_gap(oracle::laplace_by_mixture(4'000'000, 1.0, 8), 1.0) < 0.01);
    CHECK(oracle::laplace_gap(oracle::laplace_by_mixture(4'000'000, 2.0, 9), 2.0) < 0.01);
}

TEST_CASE("conjugate tau2 step keeps the Laplace marginal of a loading") {
    CHECK(oracle::laplace_gap(oracle::laplace_by_gibbs(2'000'000, 1.0, Tau2Rule::Conjugate, 10), 1.0) < 0.01);
}

TEST_CASE("rule names round trip") {
    CHECK(tau2_rule_from_string(to_string(Tau2Rule::InverseGaussian)) == Tau2Rule::InverseGaussian);
    CHECK(tau2_rule_from_string("conjugate") == Tau2Rule::Conjugate);
    CHECK_THROWS_AS(tau2_rule_from_string("other"), Error);
}

TEST_CASE("shrinkage chain keeps positive hyperparameters and extra columns") {
    SimConfig cfg = reference_design(20, 3);
    const auto sim = simulate_panel(cfg);
    SamplerConfig sc;
    sc.iterations = 400;
    sc.burn_in = 100;
    sc.seed = 5;
    const auto draws = run_chain_shrinkage(sim.panel, cfg.weights, PriorSpec{}, sc, 3);
    CHECK(draws.has_shrinkage());
    CHECK(draws.tau2.size() == draws.size());
    for (std::size_t g = 0; g < draws.size(); ++g) {
        REQUIRE((draws.tau2[g].array() > 0.0).all());
        REQUIRE(draws.phi2[g] > 0.0);
    }
    const auto names = draws.parameter_names();
    CHECK(std::find(names.begin(), names.end(), "tau2_3") != names.end());
    CHECK(std::find(names.begin(), names.end(), "phi2") != names.end());
    CHECK(draws.manifest.tau2_rule == "conjugate");
}

}  // TEST_SUITE
