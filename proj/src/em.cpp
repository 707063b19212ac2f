#include "xctrl/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "xctrl/errors.hpp"
#include "xctrl/parallel.hpp"
#include "xctrl/rng.hpp"

namespace xctrl {

std::atomic<std::uint64_t>& em_monotonicity_violations() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Per-component terms precomputed once per EM iteration.
struct PreparedComponent {
    double log_weight;
    double mx, mz;
    double inv_xx, inv_xz, inv_zz;  // covariance inverse
    double log_norm;                // -log(2pi) - 0.5*log|Sigma|

    static PreparedComponent from(const GaussianComponent& c) {
        const double d = c.cov.det();
        return {std::log(c.weight),
                c.mean.x,
                c.mean.z,
                c.cov.zz / d,
                -c.cov.xz / d,
                c.cov.xx / d,
                -kLog2Pi - 0.5 * std::log(d)};
    }

    double log_pdf(Vec2 p) const {
        const double dx = p.x - mx;
        const double dz = p.z - mz;
        return log_norm - 0.5 * (inv_xx * dx * dx + 2.0 * inv_xz * dx * dz + inv_zz * dz * dz);
    }
};

// Weighted zeroth/first/second moments per component, plus the block's
// contribution to the data log-likelihood.
struct BlockStats {
    static constexpr int kMaxK = 16;
    double n[kMaxK] = {};
    double sx[kMaxK] = {};
    double sz[kMaxK] = {};
    double sxx[kMaxK] = {};
    double sxz[kMaxK] = {};
    double szz[kMaxK] = {};
    double loglik = 0.0;

    void add(const BlockStats& o, int k) {
        for (int j = 0; j < k; ++j) {
            n[j] += o.n[j];
            sx[j] += o.sx[j];
            sz[j] += o.sz[j];
            sxx[j] += o.sxx[j];
            sxz[j] += o.sxz[j];
            szz[j] += o.szz[j];
        }
        loglik += o.loglik;
    }
};

// Fused E-step + sufficient statistics over one block of points.
void accumulate_block(std::span<const Vec2> pts, std::span<const double> wts,
                      std::span<const PreparedComponent> comps, BlockStats& out) {
    const int k = static_cast<int>(comps.size());
    double lw[BlockStats::kMaxK];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 p = pts[i];
        const double w = wts[i];
        double max_lw = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
            lw[j] = comps[j].log_weight + comps[j].log_pdf(p);
            max_lw = std::max(max_lw, lw[j]);
        }
        double denom = 0.0;
        for (int j = 0; j < k; ++j) {
            lw[j] = std::exp(lw[j] - max_lw);
            denom += lw[j];
        }
        out.loglik += w * (max_lw + std::log(denom));
        const double scale = w / denom;
        for (int j = 0; j < k; ++j) {
            const double r = lw[j] * scale;  // weighted responsibility
            out.n[j] += r;
            out.sx[j] += r * p.x;
            out.sz[j] += r * p.z;
            out.sxx[j] += r * p.x * p.x;
            out.sxz[j] += r * p.x * p.z;
            out.szz[j] += r * p.z * p.z;
        }
    }
}

// One EM iteration: returns the weighted log-likelihood of the *current*
// parameters and overwrites them with the M-step update. Block-parallel with
// a fixed block size, so the result is identical for any thread count.
double em_iterate(std::span<const Vec2> pts, std::span<const double> wts,
                  double weight_sum, std::vector<GaussianComponent>& comps,
                  double cov_floor, bool parallel) {
    const int k = static_cast<int>(comps.size());
    std::vector<PreparedComponent> prep;
    prep.reserve(comps.size());
    for (const auto& c : comps) prep.push_back(PreparedComponent::from(c));

    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
    const std::ptrdiff_t nblocks = block_count(n);
    std::vector<BlockStats> partial(static_cast<std::size_t>(nblocks));
    parallel_for(
        nblocks,
        [&](std::ptrdiff_t b) {
            const std::ptrdiff_t lo = b * kReduceBlock;
            const std::ptrdiff_t hi = std::min(n, lo + kReduceBlock);
            accumulate_block(pts.subspan(lo, hi - lo), wts.subspan(lo, hi - lo), prep,
                             partial[static_cast<std::size_t>(b)]);
        },
        parallel);

    BlockStats total;
    for (const auto& p : partial) total.add(p, k);

    for (int j = 0; j < k; ++j) {
        // Guard against a component losing all responsibility to underflow:
        // keep its previous shape and let the weight record the collapse.
        const double nj = total.n[j];
        if (!(nj > weight_sum * 1e-12)) {
            comps[j].weight = 1e-12;
            continue;
        }
        comps[j].weight = nj / weight_sum;
        const double mean_x = total.sx[j] / nj;
        const double mean_z = total.sz[j] / nj;
        comps[j].mean = {mean_x, mean_z};
        comps[j].cov.xx = total.sxx[j] / nj - mean_x * mean_x + cov_floor;
        comps[j].cov.xz = total.sxz[j] / nj - mean_x * mean_z;
        comps[j].cov.zz = total.szz[j] / nj - mean_z * mean_z + cov_floor;
    }
    // Renormalize in case the underflow guard fired.
    double wsum = 0.0;
    for (const auto& c : comps) wsum += c.weight;
    if (wsum != 1.0)
        for (auto& c : comps) c.weight /= wsum;

    return total.loglik;
}

// k-means++-style seeding: first mean by sample weight, subsequent means by
// weight times squared distance to the nearest chosen mean.
std::vector<Vec2> seed_means(std::span<const Vec2> pts, std::span<const double> wts,
                             int k, Rng& rng) {
    const std::size_t n = pts.size();
    std::vector<Vec2> means;
    means.reserve(static_cast<std::size_t>(k));
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    auto pick_by = [&](auto&& mass_of) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += mass_of(i);
        if (total <= 0.0) return rng.uniform_below(n);
        const double u = rng.uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += mass_of(i);
            if (u < acc) return static_cast<std::uint64_t>(i);
        }
        return static_cast<std::uint64_t>(n - 1);
    };

    for (int c = 0; c < k; ++c) {
        std::size_t idx;
        if (c == 0) {
            idx = pick_by([&](std::size_t i) { return wts[i]; });
        } else {
            idx = pick_by([&](std::size_t i) { return wts[i] * d2[i]; });
        }
        means.push_back(pts[idx]);
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = pts[i].x - pts[idx].x;
            const double dz = pts[i].z - pts[idx].z;
            d2[i] = std::min(d2[i], dx * dx + dz * dz);
        }
    }
    return means;
}

Cov2 pooled_covariance(std::span<const Vec2> pts, std::span<const double> wts,
                       double weight_sum, double cov_floor) {
    double mx = 0, mz = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        mx += wts[i] * pts[i].x;
        mz += wts[i] * pts[i].z;
    }
    mx /= weight_sum;
    mz /= weight_sum;
    double sxx = 0, sxz = 0, szz = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dx = pts[i].x - mx;
        const double dz = pts[i].z - mz;
        sxx += wts[i] * dx * dx;
        sxz += wts[i] * dx * dz;
        szz += wts[i] * dz * dz;
    }
    return {sxx / weight_sum + cov_floor, sxz / weight_sum, szz / weight_sum + cov_floor};
}

std::vector<double> normalized_weights(std::size_t n, std::span<const double> weights) {
    std::vector<double> wts;
    if (weights.empty()) {
        wts.assign(n, 1.0);
        return wts;
    }
    if (weights.size() != n) throw FitError("weights length does not match points");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw FitError("sample weights must be positive");
        sum += w;
    }
    // Normalize to mean 1 so fits are invariant to the overall weight scale.
    const double scale = static_cast<double>(n) / sum;
    wts.reserve(n);
    for (double w : weights) wts.push_back(w * scale);
    return wts;
}

}  // namespace

EMFitResult em_fit(std::span<const Vec2> points, int k,
                   std::span<const double> weights, std::uint64_t seed,
                   const EMConfig& config) {
    const std::size_t n = points.size();
    if (k < 1) throw FitError("component count must be at least 1");
    if (static_cast<std::size_t>(k) > n)
        throw FitError("component count " + std::to_string(k) + " exceeds " +
                       std::to_string(n) + " points");
    if (k > BlockStats::kMaxK) throw FitError("component count too large");

    if (k >= 2) {
        bool all_equal = true;
        for (std::size_t i = 1; i < n && all_equal; ++i)
            all_equal = points[i].x == points[0].x && points[i].z == points[0].z;
        if (all_equal) throw FitError("degenerate fit: all points identical with k >= 2");
    }

    const std::vector<double> wts = normalized_weights(n, weights);
    const double weight_sum = static_cast<double>(n);  // after mean-1 normalization

    Rng rng(derive_seed(seed, std::string_view("em_init")));
    EMFitResult result;
    auto& comps = result.model.components;
    comps.resize(static_cast<std::size_t>(k));
    const auto means = seed_means(points, wts, k, rng);
    const Cov2 pooled = pooled_covariance(points, wts, weight_sum, config.cov_floor);
    for (int j = 0; j < k; ++j) {
        comps[static_cast<std::size_t>(j)] = {1.0 / k, means[static_cast<std::size_t>(j)], pooled};
    }

    double prev_mean_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < config.max_iter; ++iter) {
        // em_iterate reports the likelihood of the parameters it was handed,
        // then overwrites them with the M-step update.
        const double ll = em_iterate(points, wts, weight_sum, comps, config.cov_floor,
                                     config.parallel);
        const double mean_ll = ll / weight_sum;
        result.loglik_trace.push_back(mean_ll);
        result.iterations = iter + 1;
        if (mean_ll < prev_mean_ll - 1e-8) ++em_monotonicity_violations();
        if (mean_ll - prev_mean_ll < config.tol && iter > 0) {
            result.converged = true;
            break;
        }
        prev_mean_ll = mean_ll;
    }

    result.model.sort_components();
    result.model.n_fit = n;
    result.model.train_loglik =
        total_loglik(result.model, points, wts, config.parallel);
    result.model.seed = seed;
    result.model.validate();
    return result;
}

double total_loglik(const MixtureModel& model, std::span<const Vec2> points,
                    std::span<const double> weights, bool parallel) {
    std::vector<PreparedComponent> prep;
    for (const auto& c : model.components) prep.push_back(PreparedComponent::from(c));
    const int k = model.k();

    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
    const std::ptrdiff_t nblocks = block_count(n);
    std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
    parallel_for(
        nblocks,
        [&](std::ptrdiff_t b) {
            const std::ptrdiff_t lo = b * kReduceBlock;
            const std::ptrdiff_t hi = std::min(n, lo + kReduceBlock);
            double acc = 0.0;
            double lw[BlockStats::kMaxK];
            for (std::ptrdiff_t i = lo; i < hi; ++i) {
                const Vec2 p = points[static_cast<std::size_t>(i)];
                double max_lw = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < k; ++j) {
                    lw[j] = prep[static_cast<std::size_t>(j)].log_weight +
                            prep[static_cast<std::size_t>(j)].log_pdf(p);
                    max_lw = std::max(max_lw, lw[j]);
                }
                double s = 0.0;
                for (int j = 0; j < k; ++j) s += std::exp(lw[j] - max_lw);
                const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
                acc += w * (max_lw + std::log(s));
            }
            partial[static_cast<std::size_t>(b)] = acc;
        },
        parallel);

    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double mean_loglik(const MixtureModel& model, std::span<const Vec2> points,
                   std::span<const double> weights, bool parallel) {
    if (points.empty()) throw FitError("cannot evaluate likelihood on empty set");
    double wsum = 0.0;
    if (weights.empty()) {
        wsum = static_cast<double>(points.size());
    } else {
        for (double w : weights) wsum += w;
    }
    return total_loglik(model, points, weights, parallel) / wsum;
}

MixtureModel select_k(std::span<const Vec2> points, std::uint64_t seed,
                      const EMConfig& config, KSelectionReport* report) {
    const std::size_t n = points.size();
    if (n < config.min_pitches)
        throw FitError("bin has " + std::to_string(n) + " fit-eligible pitches, below the " +
                       std::to_string(config.min_pitches) + "-pitch threshold");

    // Random train/validation partition.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, std::string_view("split")));
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng.uniform_below(i + 1);
        std::swap(order[i], order[j]);
    }
    std::size_t n_train = static_cast<std::size_t>(
        std::ceil(config.split_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<Vec2> train, valid;
    train.reserve(n_train);
    valid.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i)
        (i < n_train ? train : valid).push_back(points[order[i]]);

    if (report) {
        report->n_train = n_train;
        report->n_valid = n - n_train;
        report->valid_mean_ll.assign(static_cast<std::size_t>(config.k_max) + 1,
                                     std::numeric_limits<double>::quiet_NaN());
    }

    int best_k = 0;
    double best_valid_ll = -std::numeric_limits<double>::infinity();
    double best_valid_total = 0.0;
    for (int k = config.k_min; k <= config.k_max; ++k) {
        if (static_cast<std::size_t>(k) > train.size()) break;
        // Best-of-R restarts by train log-likelihood.
        MixtureModel candidate;
        double best_train = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (int r = 0; r < config.restarts; ++r) {
            try {
                auto fit = em_fit(train, k, {}, derive_seed(seed, std::string_view("em"),
                                                            std::uint64_t(k), std::uint64_t(r)),
                                  config);
                if (fit.model.train_loglik > best_train) {
                    best_train = fit.model.train_loglik;
                    candidate = std::move(fit.model);
                }
                any = true;
            } catch (const FitError&) {
                // a restart may collapse; others can still succeed
            }
        }
        if (!any) continue;
        const double valid_ll = mean_loglik(candidate, valid, {}, config.parallel);
        if (report) report->valid_mean_ll[static_cast<std::size_t>(k)] = valid_ll;
        // Near-ties go to the smaller (already chosen) k.
        if (best_k == 0 || valid_ll > best_valid_ll + config.k_tie_tol) {
            best_k = k;
            best_valid_ll = valid_ll;
            best_valid_total = valid_ll * static_cast<double>(valid.size());
        }
    }
    if (best_k == 0) throw FitError("no component count produced a valid fit");
    if (report) report->chosen_k = best_k;

    // Refit on all fit-eligible points with the chosen K.
    MixtureModel final_model;
    double best_train = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int r = 0; r < config.restarts; ++r) {
        try {
            auto fit = em_fit(points, best_k, {},
                              derive_seed(seed, std::string_view("refit"), std::uint64_t(r)),
                              config);
            if (fit.model.train_loglik > best_train) {
                best_train = fit.model.train_loglik;
                final_model = std::move(fit.model);
            }
            any = true;
        } catch (const FitError&) {
        }
    }
    if (!any) throw FitError("refit with selected k failed");
    final_model.valid_loglik = best_valid_total;
    final_model.seed = seed;
    return final_model;
}

}  // namespace xctrl
