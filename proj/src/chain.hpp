#pragma once

#include "logarch/sampler.hpp"

namespace logarch {

struct ShrinkageSettings;

namespace detail {

/// Shared Gibbs driver; `shrink` switches the loading block to the shrinkage steps.
PosteriorDraws run_gibbs(const ModelData& data, const PriorSpec& prior, const SamplerConfig& cfg, int q,
                         const ShrinkageSettings* shrink);

}  // namespace detail
}  // namespace logarch
