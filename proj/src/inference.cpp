#include "logarch/inference.hpp"

#include "logarch/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace logarch {

double quantile_type7(std::vector<double> values, double prob) {
    if (values.empty()) throw Error("quantile: no values");
    if (!(prob >= 0.0 && prob <= 1.0)) throw Error("quantile: probability outside [0, 1]");
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
    const double a = values[lo];
    if (hi == lo) return a;
    const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(hi), values.end());
    return a + (h - static_cast<double>(lo)) * (b - a);
}

Eigen::MatrixXd log_volatility(const ModelData& d, double rho, double gamma, double delta,
                               const Eigen::VectorXd& beta, const Eigen::MatrixXd& common) {
    if (common.rows() != d.units || common.cols() != d.periods) {
        throw Error("log_volatility: common component has the wrong shape");
    }
    if (beta.size() != d.covariates) throw Error("log_volatility: beta has the wrong length");
    return rho * d.m_ystar + gamma * d.lag + delta * d.m_lag + d.covariate_effect(beta) + common;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

}  // namespace

VolatilityField recover_volatility(const PosteriorDraws& draws, const ModelData& d) {
    if (draws.size() == 0 || draws.common.empty()) throw Error("recover_volatility: no draws");
    if (draws.units != d.units || draws.periods != d.periods || draws.covariates != d.covariates) {
        throw Error("recover_volatility: draws do not match the data dimensions");
    }
    const std::size_t snaps = draws.common.size();
    std::vector<Eigen::MatrixXd> fields;
    fields.reserve(snaps);
    for (std::size_t s = 0; s < snaps; ++s) {
        const std::size_t g = draws.field_draw[s];
        fields.push_back(log_volatility(d, draws.rho[g], draws.gamma[g], draws.delta[g], draws.beta[g], draws.common[s]));
    }

    VolatilityField out;
    out.median.resize(d.units, d.periods);
    out.lo.resize(d.units, d.periods);
    out.hi.resize(d.units, d.periods);
    std::vector<double> cell(snaps);
    for (Eigen::Index t = 0; t < d.periods; ++t) {
        for (Eigen::Index i = 0; i < d.units; ++i) {
            for (std::size_t s = 0; s < snaps; ++s) cell[s] = fields[s](i, t);
            out.median(i, t) = quantile_type7(cell, 0.5);
            out.lo(i, t) = quantile_type7(cell, 0.025);
            out.hi(i, t) = quantile_type7(cell, 0.975);
        }
    }

    Eigen::VectorXd beta_mean = Eigen::VectorXd::Zero(d.covariates);
    for (const auto& b : draws.beta) beta_mean += b;
    beta_mean /= static_cast<double>(draws.size());
    out.plugin = log_volatility(d, mean_of(draws.rho), mean_of(draws.gamma), mean_of(draws.delta), beta_mean,
                                draws.mean_common);

    std::vector<double> medians(out.median.data(), out.median.data() + out.median.size());
    out.overall_average = out.median.mean();
    out.overall_lo = quantile_type7(medians, 0.025);
    out.overall_hi = quantile_type7(medians, 0.975);
    return out;
}

VolatilityField recover_volatility(const PosteriorDraws& draws, const LogSquaredPanel& ystar,
                                   const WeightMatrix& weights, const std::vector<Eigen::MatrixXd>& x) {
    return recover_volatility(draws, ModelData::build(ystar, x, weights));
}

ParameterSummary summarize_trace(const std::string& name, const std::vector<double>& values) {
    if (values.size() < 100) {
        throw Error("summarize: need at least 100 draws, got " + std::to_string(values.size()));
    }
    ParameterSummary s;
    s.name = name;
    s.mean = mean_of(values);
    s.median = quantile_type7(values, 0.5);
    s.lo = quantile_type7(values, 0.025);
    s.hi = quantile_type7(values, 0.975);
    return s;
}

std::vector<ParameterSummary> summarize(const PosteriorDraws& draws) {
    std::vector<ParameterSummary> out;
    for (const auto& name : draws.parameter_names()) out.push_back(summarize_trace(name, draws.parameter(name)));
    return out;
}

std::vector<std::filesystem::path> trace_export(const PosteriorDraws& draws, const std::vector<std::string>& names,
                                                const std::filesystem::path& directory) {
    if (draws.size() == 0) throw Error("trace_export: no draws");
    std::filesystem::create_directories(directory);
    std::vector<std::filesystem::path> written;
    for (const auto& name : names) {
        const std::vector<double> values = draws.parameter(name);
        const auto path = directory / ("trace_" + name + ".csv");
        std::ofstream os(path);
        if (!os) throw Error("trace_export: cannot open " + path.string());
        os << "iteration,value,running_mean\n";
        double acc = 0.0;
        for (std::size_t g = 0; g < values.size(); ++g) {
            acc += values[g];
            os << draws.iteration[g] << ',' << io::format_double(values[g]) << ','
               << io::format_double(acc / static_cast<double>(g + 1)) << '\n';
        }
        written.push_back(path);
    }
    return written;
}

std::vector<double> read_trace(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("read_trace: cannot open " + path.string());
    std::string line;
    std::getline(is, line);
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto first = line.find(',');
        const auto second = line.find(',', first + 1);
        if (first == std::string::npos || second == std::string::npos) {
            throw Error("read_trace: malformed line in " + path.string());
        }
        values.push_back(std::stod(line.substr(first + 1, second - first - 1)));
    }
    return values;
}

}  // namespace logarch
