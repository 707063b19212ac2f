#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xctrl/em.hpp"
#include "xctrl/gaussian.hpp"
#include "xctrl/types.hpp"

namespace xctrl {

struct BootstrapConfig {
    int replicates = 100;  // B
    int max_retries = 3;   // per failed replicate, with derived sub-seeds
    int min_ok = 90;       // fewer successes aborts the bin
    // Replicate models score the original pitches by default, isolating
    // model-fit uncertainty over a fixed evaluation set. Set false to score
    // each resample instead.
    bool score_original = true;
    EMConfig em;
};

struct BootstrapSummary {
    BinKey bin;
    std::vector<double> replicate_xctrl;  // successful replicates, index order
    double median_xctrl = 0.0;
    double ci_low = 0.0;   // 5th percentile
    double ci_high = 0.0;  // 95th percentile
    MixtureModel median_model;
    int n_ok = 0;
    // Set by the shrinkage path.
    std::optional<double> omega;
    std::optional<int> n_synthetic;
    bool prior_passthrough = false;
};

// Uniform-with-replacement bootstrap over the bin's pitches. Each replicate
// re-applies the IQR mask, re-selects K, refits, and records the mean xCTRL
// of the evaluation set under the replicate model. Median and the 5th/95th
// percentiles summarize the replicate values; the model attached to the
// median replicate is kept (lower middle when the count is even).
// Deterministic given seed. Throws FitError when too few replicates succeed.
BootstrapSummary bootstrap_bin(const BinnedData& bin, const BootstrapConfig& config,
                               std::uint64_t seed);

// Summary of already-computed replicate values (used by the shrinkage path).
BootstrapSummary summarize_replicates(const BinKey& bin,
                                      std::vector<double> values,
                                      std::vector<MixtureModel> models);

}  // namespace xctrl
