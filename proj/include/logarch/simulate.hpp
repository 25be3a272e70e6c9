#pragma once

#include "logarch/core.hpp"

#include <cstdint>

namespace logarch {

/// Covariates are drawn iid Uniform(lower, upper).
struct CovariateLaw {
    double lower = 0.0;
    double upper = 1.0;
};

/// Factors and loadings are drawn iid N(0, sd^2).
struct FactorLaw {
    double factor_sd = 1.0;
    double loading_sd = 1.0;
};

struct SimConfig {
    Eigen::Index periods = 100;
    int factors = 2;
    SpatialParams params{0.16, 0.15, 0.2};
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, -2.0);
    WeightMatrix weights;
    int burn_in_periods = 200;
    std::uint64_t seed = 1;
    CovariateLaw covariate_law;
    FactorLaw factor_law;
};

/// The simulation design used for validation: 7x7 queen lattice, row-normalized,
/// rho = 0.16, gamma = 0.15, delta = 0.2, beta = -2, q = 2.
SimConfig reference_design(Eigen::Index periods, std::uint64_t seed);

struct SimTruth {
    SpatialParams params;
    Eigen::VectorXd beta;
    Eigen::MatrixXd loadings;  // n x q
    Eigen::MatrixXd factors;   // q x T
    Eigen::MatrixXd hstar;     // n x T, log-volatility
    Eigen::MatrixXd epsstar;   // n x T, log(eps^2)
    Eigen::MatrixXd ystar;     // n x T
    Eigen::VectorXd ystar0;
};

struct Simulation {
    PanelData panel;
    SimTruth truth;
};

/// Draws a panel from the reduced form Y*_t = A Y*_{t-1} + S^{-1}(X_t beta + Lambda f_t + eps*_t)
/// after `burn_in_periods` discarded steps from Y* = 0. Y keeps the sign of eps.
Simulation simulate_panel(const SimConfig& cfg);

}  // namespace logarch
