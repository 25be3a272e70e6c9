#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace logarch {

struct RunManifest {
    std::uint64_t seed = 0;
    int factors = 0;
    bool shrinkage = false;
    std::string tau2_rule;
    long iterations = 0;
    long burn_in = 0;
    long thin = 1;
    double rho_step_initial = 0.0;
    double rho_step_final = 0.0;
    double acceptance_burn_in = 0.0;
    /// Acceptance rate of the frozen kernel after burn-in.
    double acceptance_rate = 0.0;
    double runtime_seconds = 0.0;
    std::size_t floored_cells = 0;
};

/// Retained draws of one chain. Scalar blocks are kept for every retained
/// iteration; the n x T common component Lambda*f_t is kept as snapshots on a
/// regular stride (`field_draw` indexes into the retained draws), while its
/// posterior mean and the mean mixture moments use every retained draw.
struct PosteriorDraws {
    Eigen::Index units = 0;
    Eigen::Index periods = 0;
    Eigen::Index covariates = 0;
    int factors = 0;

    std::vector<long> iteration;
    std::vector<double> rho;
    std::vector<double> gamma;
    std::vector<double> delta;
    std::vector<Eigen::VectorXd> beta;
    std::vector<double> loglik;
    std::vector<Eigen::VectorXd> tau2;  // shrinkage only
    std::vector<double> phi2;           // shrinkage only

    std::vector<std::size_t> field_draw;
    std::vector<Eigen::MatrixXd> common;

    Eigen::MatrixXd mean_common;
    Eigen::MatrixXd mean_mix_mean;
    Eigen::MatrixXd mean_mix_var;

    RunManifest manifest;

    [[nodiscard]] std::size_t size() const { return rho.size(); }
    [[nodiscard]] bool has_shrinkage() const { return !phi2.empty(); }

    /// Column names in export order: rho, gamma, delta, beta_1.., then
    /// tau2_1.., phi2 for shrinkage chains, and loglik.
    [[nodiscard]] std::vector<std::string> parameter_names() const;

    /// Trace of a named parameter. Throws Error for unknown names.
    [[nodiscard]] std::vector<double> parameter(const std::string& name) const;
};

}  // namespace logarch
