#include "xctrl/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xctrl/errors.hpp"
#include "xctrl/parallel.hpp"

namespace xctrl {

IntentPosterior posterior(Vec2 pitch, const MixtureModel& model) {
    const int k = model.k();
    IntentPosterior out;
    out.pitch = pitch;
    out.probabilities.resize(static_cast<std::size_t>(k));
    out.distances.resize(static_cast<std::size_t>(k));

    // log-space with max-subtraction: the max term is exp(0) = 1, so the
    // normalizer can never vanish.
    double max_lw = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        const auto& c = model.components[static_cast<std::size_t>(j)];
        const double lw = std::log(c.weight) + c.log_pdf(pitch);
        out.probabilities[static_cast<std::size_t>(j)] = lw;
        out.distances[static_cast<std::size_t>(j)] = euclidean_delta(pitch, c.mean);
        max_lw = std::max(max_lw, lw);
    }
    double denom = 0.0;
    for (auto& p : out.probabilities) {
        p = std::exp(p - max_lw);
        denom += p;
    }
    for (auto& p : out.probabilities) p /= denom;
    return out;
}

double weighted_distance(std::span<const double> probabilities,
                         std::span<const double> distances) {
    double s = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i)
        s += probabilities[i] * distances[i];
    return s;
}

PitchScore score_pitch(Vec2 pitch, const MixtureModel& model) {
    PitchScore score;
    score.posterior = posterior(pitch, model);
    score.xctrl = weighted_distance(score.posterior.probabilities, score.posterior.distances);
    return score;
}

BinScore score_bin(const BinnedData& bin, const MixtureModel& model,
                   bool keep_per_pitch, bool parallel) {
    if (bin.pitches.empty()) throw DataError("cannot score an empty bin");
    const std::size_t n = bin.pitches.size();

    std::vector<double> xctrl(n);
    std::vector<PitchScore> detail;
    if (keep_per_pitch) detail.resize(n);
    parallel_for(
        static_cast<std::ptrdiff_t>(n),
        [&](std::ptrdiff_t i) {
            const auto idx = static_cast<std::size_t>(i);
            auto s = score_pitch(bin.pitches[idx].location, model);
            s.was_fit_outlier = bin.fit_mask.size() == n && bin.fit_mask[idx] == 0;
            xctrl[idx] = s.xctrl;
            if (keep_per_pitch) detail[idx] = std::move(s);
        },
        parallel);

    double sum = 0.0;
    for (double v : xctrl) sum += v;

    BinScore out;
    out.bin = bin.key;
    out.mean_xctrl = sum / static_cast<double>(n);
    out.n_scored = n;
    if (keep_per_pitch) out.per_pitch = std::move(detail);
    return out;
}

OverallScore pitcher_overall(const std::optional<BinScore>& left,
                             const std::optional<BinScore>& right,
                             bool weight_by_count) {
    if (!left && !right) throw DataError("pitcher_overall needs at least one side");
    if (!left || !right) {
        const auto& side = left ? *left : *right;
        return {side.mean_xctrl, true};
    }
    if (weight_by_count) {
        const double nl = static_cast<double>(left->n_scored);
        const double nr = static_cast<double>(right->n_scored);
        return {(left->mean_xctrl * nl + right->mean_xctrl * nr) / (nl + nr), false};
    }
    return {0.5 * (left->mean_xctrl + right->mean_xctrl), false};
}

std::vector<RankingRow> rank_rows(std::vector<RankingRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
        if (a.xctrl != b.xctrl) return a.xctrl < b.xctrl;
        if (a.n != b.n) return a.n > b.n;
        if (a.pitcher_id != b.pitcher_id) return a.pitcher_id < b.pitcher_id;
        if (a.season != b.season) return a.season < b.season;
        return a.pitch_type < b.pitch_type;
    });
    return rows;
}

double DensityGrid::captured_mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * cell_width() * cell_height();
}

DensityGrid density_grid(const MixtureModel& model, double x_min, double x_max,
                         double z_min, double z_max, int resolution, bool parallel) {
    if (resolution < 2) throw DataError("grid resolution must be at least 2 per axis");
    if (!(x_max > x_min) || !(z_max > z_min)) throw DataError("degenerate grid range");

    DensityGrid grid;
    grid.x_min = x_min;
    grid.x_max = x_max;
    grid.z_min = z_min;
    grid.z_max = z_max;
    grid.resolution = resolution;
    grid.values.resize(static_cast<std::size_t>(resolution) * resolution);

    parallel_for(
        static_cast<std::ptrdiff_t>(grid.values.size()),
        [&](std::ptrdiff_t i) {
            const int ix = static_cast<int>(i) / resolution;
            const int iz = static_cast<int>(i) % resolution;
            grid.values[static_cast<std::size_t>(i)] = model.density(grid.cell_center(ix, iz));
        },
        parallel);
    return grid;
}

}  // namespace xctrl
