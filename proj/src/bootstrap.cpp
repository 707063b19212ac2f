#include "xctrl/bootstrap.hpp"

#include <algorithm>
#include <numeric>

#include "xctrl/errors.hpp"
#include "xctrl/ingest.hpp"
#include "xctrl/parallel.hpp"
#include "xctrl/rng.hpp"
#include "xctrl/scoring.hpp"
#include "xctrl/stats.hpp"

namespace xctrl {

BootstrapSummary summarize_replicates(const BinKey& bin, std::vector<double> values,
                                      std::vector<MixtureModel> models) {
    if (values.empty() || values.size() != models.size())
        throw FitError("summarize_replicates needs matching nonempty values and models");

    BootstrapSummary out;
    out.bin = bin;
    out.replicate_xctrl = values;
    out.n_ok = static_cast<int>(values.size());

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> sorted(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = values[order[i]];

    out.median_xctrl = percentile_sorted(sorted, 50);
    out.ci_low = percentile_sorted(sorted, 5);
    out.ci_high = percentile_sorted(sorted, 95);
    // The model kept is the replicate at the median; with an even count the
    // lower-middle replicate is the one retained.
    const std::size_t median_idx = order[(order.size() - 1) / 2];
    out.median_model = std::move(models[median_idx]);
    return out;
}

BootstrapSummary bootstrap_bin(const BinnedData& bin, const BootstrapConfig& config,
                               std::uint64_t seed) {
    const std::size_t n = bin.pitches.size();
    if (n == 0) throw DataError("cannot bootstrap an empty bin");
    const std::uint64_t bin_tag = fnv1a64(bin.key.to_string());

    const int B = config.replicates;
    std::vector<double> values(static_cast<std::size_t>(B));
    std::vector<MixtureModel> models(static_cast<std::size_t>(B));
    std::vector<std::uint8_t> ok(static_cast<std::size_t>(B), 0);

    parallel_for_dynamic(
        B,
        [&](std::ptrdiff_t r) {
            for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
                const std::uint64_t sub = derive_seed(seed, std::string_view("boot"), bin_tag,
                                                      std::uint64_t(r), std::uint64_t(attempt));
                try {
                    Rng rng(sub);
                    BinnedData resample;
                    resample.key = bin.key;
                    resample.pitches.reserve(n);
                    for (std::size_t i = 0; i < n; ++i)
                        resample.pitches.push_back(bin.pitches[rng.uniform_below(n)]);
                    apply_iqr_mask(resample);

                    EMConfig em = config.em;
                    em.parallel = false;  // replicates are already parallel
                    const auto pts = fit_points(resample);
                    MixtureModel model =
                        select_k(pts, derive_seed(sub, std::string_view("fit")), em);
                    model.bin = bin.key;

                    const BinnedData& eval = config.score_original ? bin : resample;
                    const auto score = score_bin(eval, model, false, false);
                    values[static_cast<std::size_t>(r)] = score.mean_xctrl;
                    models[static_cast<std::size_t>(r)] = std::move(model);
                    ok[static_cast<std::size_t>(r)] = 1;
                    return;
                } catch (const FitError&) {
                    // retry with the next sub-seed
                }
            }
        },
        config.em.parallel);

    std::vector<double> good_values;
    std::vector<MixtureModel> good_models;
    good_values.reserve(static_cast<std::size_t>(B));
    for (int r = 0; r < B; ++r) {
        if (ok[static_cast<std::size_t>(r)]) {
            good_values.push_back(values[static_cast<std::size_t>(r)]);
            good_models.push_back(std::move(models[static_cast<std::size_t>(r)]));
        }
    }
    if (static_cast<int>(good_values.size()) < config.min_ok)
        throw FitError("bin " + bin.key.to_string() + ": only " +
                       std::to_string(good_values.size()) + " of " + std::to_string(B) +
                       " bootstrap replicates fit successfully");

    return summarize_replicates(bin.key, std::move(good_values), std::move(good_models));
}

}  // namespace xctrl
