#pragma once

#include "logarch/posterior.hpp"
#include "logarch/sampler.hpp"
#include "logarch/shrinkage.hpp"

#include <optional>
#include <string>
#include <vector>

namespace logarch {

struct DicTerms {
    double dic = 0.0;
    /// Posterior mean of the log-likelihood.
    double mean_loglik = 0.0;
    /// Log-likelihood at the posterior means. The discrete indicators enter
    /// through the per-cell posterior average of their mixture moments.
    double plugin_loglik = 0.0;
    /// Effective number of parameters, 2 (plugin - mean).
    double p_d = 0.0;
};

/// DIC = -4 E[log L] + 2 log L(posterior means).
DicTerms compute_dic(const PosteriorDraws& draws, const ModelData& data);

struct DicEntry {
    int factors = 0;
    bool ok = false;
    std::string error;
    DicTerms terms;
    RunManifest manifest;
};

struct DicReport {
    std::vector<DicEntry> entries;
    /// Smallest DIC among successful entries, ties to the smaller q.
    std::optional<int> selected_q;
};

struct ScanOptions {
    /// Worker threads; chains for different q run concurrently.
    int jobs = 1;
    /// Use the shrinkage sampler with q as q_max.
    std::optional<ShrinkageSettings> shrinkage;
};

/// Runs one chain per q. A failing chain is recorded and the scan continues.
DicReport scan_q(const ModelData& data, const PriorSpec& prior, const SamplerConfig& cfg,
                 const std::vector<int>& q_list, const ScanOptions& options = {});
DicReport scan_q(const PanelData& panel, const WeightMatrix& weights, const PriorSpec& prior,
                 const SamplerConfig& cfg, const std::vector<int>& q_list, const ScanOptions& options = {});

/// Picks the argmin over successful entries (ties to the smaller q).
std::optional<int> select_factor_count(const std::vector<DicEntry>& entries);

}  // namespace logarch
