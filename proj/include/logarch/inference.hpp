#pragma once

#include "logarch/posterior.hpp"
#include "logarch/sampler.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace logarch {

/// Empirical quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7, the R default).
double quantile_type7(std::vector<double> values, double prob);

/// h*_t = rho M Y*_t + gamma Y*_{t-1} + delta M Y*_{t-1} + X_t beta + common_t.
Eigen::MatrixXd log_volatility(const ModelData& data, double rho, double gamma, double delta,
                               const Eigen::VectorXd& beta, const Eigen::MatrixXd& common);

struct VolatilityField {
    /// Cellwise posterior median and 95% interval of h*, from the stored snapshots.
    Eigen::MatrixXd median;
    Eigen::MatrixXd lo;
    Eigen::MatrixXd hi;
    /// h* at the posterior means of (rho, gamma, delta, beta, Lambda f).
    Eigen::MatrixXd plugin;
    /// Average of the median field, with the 2.5% and 97.5% quantiles of the
    /// median field across cells.
    double overall_average = 0.0;
    double overall_lo = 0.0;
    double overall_hi = 0.0;
};

/// Evaluates h* for every stored snapshot and summarizes cellwise.
VolatilityField recover_volatility(const PosteriorDraws& draws, const ModelData& data);
VolatilityField recover_volatility(const PosteriorDraws& draws, const LogSquaredPanel& ystar,
                                   const WeightMatrix& weights, const std::vector<Eigen::MatrixXd>& x);

struct ParameterSummary {
    std::string name;
    double mean = 0.0;
    double median = 0.0;
    double lo = 0.0;  // 2.5%
    double hi = 0.0;  // 97.5%
};

/// Needs at least 100 retained draws.
std::vector<ParameterSummary> summarize(const PosteriorDraws& draws);

/// Same summary for a bare trace.
ParameterSummary summarize_trace(const std::string& name, const std::vector<double>& values);

/// Writes trace_<name>.csv (iteration,value,running_mean) per requested
/// parameter into `directory`. Returns the written paths.
std::vector<std::filesystem::path> trace_export(const PosteriorDraws& draws, const std::vector<std::string>& names,
                                                const std::filesystem::path& directory);

/// Reads the value column back from a trace file.
std::vector<double> read_trace(const std::filesystem::path& path);

}  // namespace logarch
