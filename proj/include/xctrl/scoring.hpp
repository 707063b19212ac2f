#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xctrl/gaussian.hpp"
#include "xctrl/types.hpp"

namespace xctrl {

// Per-pitch posterior over the model's targets plus the execution distance
// to each target center.
struct IntentPosterior {
    std::vector<double> probabilities;  // sums to 1
    std::vector<double> distances;      // inches, >= 0
    Vec2 pitch;
};

struct PitchScore {
    double xctrl = 0.0;  // inches; lower is better
    IntentPosterior posterior;
    bool was_fit_outlier = false;
};

struct BinScore {
    BinKey bin;
    double mean_xctrl = 0.0;
    std::size_t n_scored = 0;
    std::optional<std::vector<PitchScore>> per_pitch;  // retained on request only
};

// Bayes update of component weights at the realized location, computed in
// log-space with max-subtraction.
IntentPosterior posterior(Vec2 pitch, const MixtureModel& model);

// Dot product of a posterior vector with its distance vector.
double weighted_distance(std::span<const double> probabilities,
                         std::span<const double> distances);

PitchScore score_pitch(Vec2 pitch, const MixtureModel& model);

// Scores every pitch in the bin, IQR outliers included.
BinScore score_bin(const BinnedData& bin, const MixtureModel& model,
                   bool keep_per_pitch = false, bool parallel = true);

struct OverallScore {
    double xctrl = 0.0;
    bool partial = false;  // only one handedness side available
};

// Arithmetic mean over the left/right-hand bins (unweighted by default, as
// reported scores average the two sides evenly). Pitch-count weighting is
// available behind a flag.
OverallScore pitcher_overall(const std::optional<BinScore>& left,
                             const std::optional<BinScore>& right,
                             bool weight_by_count = false);

struct RankingRow {
    std::string pitcher_id;
    int season = 0;
    std::string pitch_type;
    double xctrl = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
    bool has_ci = true;
    bool partial = false;
};

// Ascending xCTRL (best control first); ties broken by n descending, then
// pitcher_id.
std::vector<RankingRow> rank_rows(std::vector<RankingRow> rows);

struct DensityGrid {
    double x_min = 0, x_max = 0, z_min = 0, z_max = 0;
    int resolution = 0;                  // cells per axis
    std::vector<double> values;          // row-major over x, then z
    double cell_width() const { return (x_max - x_min) / resolution; }
    double cell_height() const { return (z_max - z_min) / resolution; }
    double value_at(int ix, int iz) const { return values[static_cast<std::size_t>(ix) * resolution + iz]; }
    Vec2 cell_center(int ix, int iz) const {
        return {x_min + (ix + 0.5) * cell_width(), z_min + (iz + 0.5) * cell_height()};
    }
    // Grid sum times cell area: probability mass inside the window.
    double captured_mass() const;
};

// Mixture density at cell centers over the given window.
DensityGrid density_grid(const MixtureModel& model, double x_min, double x_max,
                         double z_min, double z_max, int resolution,
                         bool parallel = true);

// Strike-zone rectangle used by heatmap sidecars; configurable, these are
// the defaults (inches).
struct StrikeZone {
    double left = -8.5;
    double right = 8.5;
    double bottom = 18.0;
    double top = 42.0;
};

}  // namespace xctrl
