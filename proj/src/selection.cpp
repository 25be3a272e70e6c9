#include "logarch/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace logarch {

DicTerms compute_dic(const PosteriorDraws& draws, const ModelData& d) {
    if (draws.loglik.empty() || draws.loglik.size() != draws.size()) {
        throw Error("compute_dic: draws carry no log-likelihood trace");
    }
    if (draws.units != d.units || draws.periods != d.periods) {
        throw Error("compute_dic: draws do not match the data dimensions");
    }
    const double count = static_cast<double>(draws.size());
    double mean_ll = 0.0;
    double rho = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d.covariates);
    for (std::size_t g = 0; g < draws.size(); ++g) {
        mean_ll += draws.loglik[g];
        rho += draws.rho[g];
        gamma += draws.gamma[g];
        delta += draws.delta[g];
        beta += draws.beta[g];
    }
    mean_ll /= count;
    rho /= count;
    gamma /= count;
    delta /= count;
    beta /= count;

    DicTerms out;
    out.mean_loglik = mean_ll;
    out.plugin_loglik =
        log_likelihood(d, rho, gamma, delta, beta, draws.mean_common, draws.mean_mix_mean, draws.mean_mix_var);
    out.dic = -4.0 * out.mean_loglik + 2.0 * out.plugin_loglik;
    out.p_d = 2.0 * (out.plugin_loglik - out.mean_loglik);
    if (!std::isfinite(out.dic)) throw Error("compute_dic: non-finite DIC");
    return out;
}

std::optional<int> select_factor_count(const std::vector<DicEntry>& entries) {
    std::optional<int> best;
    double best_dic = 0.0;
    for (const auto& e : entries) {
        if (!e.ok) continue;
        if (!best || e.terms.dic < best_dic || (e.terms.dic == best_dic && e.factors < *best)) {
            best = e.factors;
            best_dic = e.terms.dic;
        }
    }
    return best;
}

DicReport scan_q(const ModelData& d, const PriorSpec& prior, const SamplerConfig& cfg, const std::vector<int>& q_list,
                 const ScanOptions& options) {
    if (q_list.empty()) throw Error("scan_q: empty list of factor counts");
    DicReport report;
    report.entries.resize(q_list.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t idx = next++; idx < q_list.size(); idx = next++) {
            DicEntry& entry = report.entries[idx];
            entry.factors = q_list[idx];
            try {
                const PosteriorDraws draws = options.shrinkage
                                                 ? run_chain_shrinkage(d, prior, cfg, q_list[idx], *options.shrinkage)
                                                 : run_chain(d, prior, cfg, q_list[idx]);
                entry.terms = compute_dic(draws, d);
                entry.manifest = draws.manifest;
                entry.ok = true;
            } catch (const std::exception& ex) {
                entry.ok = false;
                entry.error = ex.what();
            }
        }
    };

    const int jobs = std::clamp<int>(options.jobs, 1, static_cast<int>(q_list.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    report.selected_q = select_factor_count(report.entries);
    return report;
}

DicReport scan_q(const PanelData& panel, const WeightMatrix& weights, const PriorSpec& prior,
                 const SamplerConfig& cfg, const std::vector<int>& q_list, const ScanOptions& options) {
    return scan_q(ModelData::build(panel, weights, cfg.floor), prior, cfg, q_list, options);
}

}  // namespace logarch
