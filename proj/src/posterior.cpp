#include "logarch/posterior.hpp"

#include "logarch/core.hpp"

namespace logarch {

std::vector<std::string> PosteriorDraws::parameter_names() const {
    std::vector<std::string> names{"rho", "gamma", "delta"};
    for (Eigen::Index c = 0; c < covariates; ++c) names.push_back("beta_" + std::to_string(c + 1));
    if (has_shrinkage()) {
        for (int m = 0; m < factors; ++m) names.push_back("tau2_" + std::to_string(m + 1));
        names.emplace_back("phi2");
    }
    names.emplace_back("loglik");
    return names;
}

namespace {

// Parses "<prefix><1-based index>" and returns the 0-based index, or -1.
long indexed(const std::string& name, const std::string& prefix, long count) {
    if (name.rfind(prefix, 0) != 0) return -1;
    const std::string rest = name.substr(prefix.size());
    if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos) return -1;
    const long idx = std::stol(rest) - 1;
    return idx >= 0 && idx < count ? idx : -1;
}

}  // namespace

std::vector<double> PosteriorDraws::parameter(const std::string& name) const {
    if (name == "rho") return rho;
    if (name == "gamma") return gamma;
    if (name == "delta") return delta;
    if (name == "loglik") return loglik;
    if (name == "phi2" && has_shrinkage()) return phi2;
    if (const long c = indexed(name, "beta_", covariates); c >= 0) {
        std::vector<double> out;
        out.reserve(beta.size());
        for (const auto& b : beta) out.push_back(b(c));
        return out;
    }
    if (has_shrinkage()) {
        if (const long m = indexed(name, "tau2_", factors); m >= 0) {
            std::vector<double> out;
            out.reserve(tau2.size());
            for (const auto& t : tau2) out.push_back(t(m));
            return out;
        }
    }
    throw Error("unknown parameter '" + name + "'");
}

}  // namespace logarch
