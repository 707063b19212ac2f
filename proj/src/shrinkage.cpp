#include "xctrl/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "xctrl/errors.hpp"
#include "xctrl/parallel.hpp"
#include "xctrl/scoring.hpp"

namespace xctrl {

std::vector<Vec2> synthesize_prior_samples(const MixtureModel& prior, int n,
                                           std::uint64_t seed) {
    Rng rng(derive_seed(seed, std::string_view("synth")));
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(std::max(0, n)));
    for (int i = 0; i < n; ++i) out.push_back(sample(prior, rng));
    return out;
}

namespace {

struct SplitIndices {
    std::vector<std::size_t> train, test;
};

SplitIndices split_real(std::size_t n, double fraction, std::uint64_t seed) {
    if (n < 2) throw FitError("need at least 2 real pitches for a train/test split");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng.uniform_below(i + 1);
        std::swap(order[i], order[j]);
    }
    std::size_t n_train =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    SplitIndices split;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return split;
}

// Fits the blended set (real train pitches at weight 1, synthetic at omega)
// across the K range with R restarts; both the restart and K are chosen by
// out-of-sample likelihood on the held-out real pitches.
MixtureModel fit_blended_heldout(std::span<const Vec2> real_train,
                                 std::span<const Vec2> synthetic, double omega,
                                 std::span<const Vec2> real_test, std::uint64_t seed,
                                 const ShrinkageConfig& config, double* heldout_ll) {
    std::vector<Vec2> pts(real_train.begin(), real_train.end());
    pts.insert(pts.end(), synthetic.begin(), synthetic.end());
    std::vector<double> wts(real_train.size(), 1.0);
    wts.insert(wts.end(), synthetic.size(), omega);

    EMConfig em = config.em;
    em.restarts = config.restarts;
    em.parallel = false;

    MixtureModel best;
    double best_ll = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int k = em.k_min; k <= em.k_max; ++k) {
        if (static_cast<std::size_t>(k) > pts.size()) break;
        for (int r = 0; r < em.restarts; ++r) {
            try {
                auto fit = em_fit(pts, k, wts,
                                  derive_seed(seed, std::string_view("blend"),
                                              std::uint64_t(k), std::uint64_t(r)),
                                  em);
                const double ll = mean_loglik(fit.model, real_test, {}, false);
                if (ll > best_ll) {
                    best_ll = ll;
                    best = std::move(fit.model);
                }
                any = true;
            } catch (const FitError&) {
            }
        }
    }
    if (!any) throw FitError("no blended fit succeeded");
    if (heldout_ll) *heldout_ll = best_ll;
    return best;
}

std::vector<Vec2> gather(std::span<const Vec2> pts, const std::vector<std::size_t>& idx) {
    std::vector<Vec2> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(pts[i]);
    return out;
}

}  // namespace

double select_omega(std::span<const Vec2> count_pitches, const MixtureModel& prior,
                    const ShrinkageConfig& config, std::uint64_t seed) {
    if (count_pitches.empty()) throw DataError("no count-specific pitches");
    if (config.omega_mesh.empty()) throw ConfigError("omega mesh is empty");
    for (std::size_t i = 0; i < config.omega_mesh.size(); ++i) {
        const double w = config.omega_mesh[i];
        if (!(w > 0.0 && w < 1.0) || (i > 0 && w <= config.omega_mesh[i - 1]))
            throw ConfigError("omega mesh must be strictly increasing within (0, 1)");
    }
    if (config.omega_mesh.size() == 1) return config.omega_mesh.front();

    const auto split = split_real(count_pitches.size(), config.split_fraction,
                                  derive_seed(seed, std::string_view("omega_split")));
    const auto real_train = gather(count_pitches, split.train);
    const auto real_test = gather(count_pitches, split.test);

    const std::size_t n_mesh = config.omega_mesh.size();
    std::vector<double> heldout(n_mesh, std::numeric_limits<double>::quiet_NaN());
    parallel_for_dynamic(
        static_cast<std::ptrdiff_t>(n_mesh),
        [&](std::ptrdiff_t wi) {
            const double omega = config.omega_mesh[static_cast<std::size_t>(wi)];
            const std::uint64_t synth_tag = config.redraw_synthetic
                                                ? static_cast<std::uint64_t>(wi)
                                                : std::uint64_t(0);
            const auto synthetic = synthesize_prior_samples(
                prior, config.n_synthetic,
                derive_seed(seed, std::string_view("omega_synth"), synth_tag));
            try {
                double ll = 0.0;
                fit_blended_heldout(real_train, synthetic, omega, real_test,
                                    derive_seed(seed, std::string_view("omega_fit"),
                                                std::uint64_t(wi)),
                                    config, &ll);
                heldout[static_cast<std::size_t>(wi)] = ll;
            } catch (const FitError&) {
                // this omega is skipped
            }
        },
        config.em.parallel);

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_i = n_mesh;
    for (std::size_t i = 0; i < n_mesh; ++i) {
        if (std::isnan(heldout[i])) continue;
        if (heldout[i] > best) {
            best = heldout[i];
            best_i = i;
        }
    }
    if (best_i == n_mesh) throw FitError("every omega mesh point failed to fit");
    return config.omega_mesh[best_i];
}

BootstrapSummary shrunken_density(std::span<const Vec2> count_pitches,
                                  const MixtureModel& prior, double omega,
                                  const ShrinkageConfig& config, std::uint64_t seed,
                                  const BinKey& bin) {
    if (count_pitches.empty()) throw DataError("no count-specific pitches");

    BinnedData real_bin;
    real_bin.key = bin;
    for (const auto& p : count_pitches) {
        PitchRecord rec;
        rec.location = p;
        real_bin.pitches.push_back(std::move(rec));
    }
    real_bin.fit_mask.assign(real_bin.pitches.size(), 1);

    // Too little real data to say anything count-specific: report the prior.
    if (count_pitches.size() < config.min_real_pitches) {
        const auto score = score_bin(real_bin, prior, false, config.em.parallel);
        BootstrapSummary out;
        out.bin = bin;
        out.replicate_xctrl = {score.mean_xctrl};
        out.median_xctrl = score.mean_xctrl;
        out.ci_low = score.mean_xctrl;
        out.ci_high = score.mean_xctrl;
        out.median_model = prior;
        out.n_ok = 0;
        out.omega = omega;
        out.n_synthetic = config.n_synthetic;
        out.prior_passthrough = true;
        return out;
    }

    const int B = config.replicates;
    std::vector<double> values(static_cast<std::size_t>(B));
    std::vector<MixtureModel> models(static_cast<std::size_t>(B));
    std::vector<std::uint8_t> ok(static_cast<std::size_t>(B), 0);

    parallel_for_dynamic(
        B,
        [&](std::ptrdiff_t b) {
            for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
                const std::uint64_t sub = derive_seed(seed, std::string_view("shrink"),
                                                      std::uint64_t(b), std::uint64_t(attempt));
                try {
                    const auto split =
                        split_real(count_pitches.size(), config.split_fraction,
                                   derive_seed(sub, std::string_view("split")));
                    const auto real_train = gather(count_pitches, split.train);
                    const auto real_test = gather(count_pitches, split.test);
                    const std::uint64_t synth_tag =
                        config.redraw_synthetic ? static_cast<std::uint64_t>(b) : std::uint64_t(0);
                    const auto synthetic = synthesize_prior_samples(
                        prior, config.n_synthetic,
                        derive_seed(seed, std::string_view("shrink_synth"), synth_tag,
                                    std::uint64_t(config.redraw_synthetic ? attempt : 0)));
                    MixtureModel model = fit_blended_heldout(
                        real_train, synthetic, omega, real_test,
                        derive_seed(sub, std::string_view("fit")), config, nullptr);
                    model.bin = bin;

                    const auto score = score_bin(real_bin, model, false, false);
                    values[static_cast<std::size_t>(b)] = score.mean_xctrl;
                    models[static_cast<std::size_t>(b)] = std::move(model);
                    ok[static_cast<std::size_t>(b)] = 1;
                    return;
                } catch (const FitError&) {
                }
            }
        },
        config.em.parallel);

    std::vector<double> good_values;
    std::vector<MixtureModel> good_models;
    for (int b = 0; b < B; ++b) {
        if (ok[static_cast<std::size_t>(b)]) {
            good_values.push_back(values[static_cast<std::size_t>(b)]);
            good_models.push_back(std::move(models[static_cast<std::size_t>(b)]));
        }
    }
    const int min_ok = std::min(config.min_ok, B);
    if (static_cast<int>(good_values.size()) < min_ok)
        throw FitError("shrinkage: only " + std::to_string(good_values.size()) + " of " +
                       std::to_string(B) + " replicates fit successfully");

    auto out = summarize_replicates(bin, std::move(good_values), std::move(good_models));
    out.omega = omega;
    out.n_synthetic = config.n_synthetic;
    return out;
}

}  // namespace xctrl
