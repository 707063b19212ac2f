#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xctrl/bootstrap.hpp"
#include "xctrl/em.hpp"
#include "xctrl/gaussian.hpp"

namespace xctrl {

// Count-specific bins rarely reach the fitting threshold, so their densities
// are estimated by blending the observed pitches with downweighted synthetic
// draws from the count-agnostic prior. The blend weight omega is chosen by
// held-out likelihood on the real pitches.
struct ShrinkageConfig {
    int n_synthetic = 250;
    std::vector<double> omega_mesh = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int replicates = 100;  // B
    int restarts = 5;      // R, applied inside the held-out fit
    double split_fraction = 0.8;
    // Below this many real pitches the prior is reported unchanged.
    std::size_t min_real_pitches = 20;
    // Synthetic samples are redrawn per (omega, replicate) by default; set
    // false to freeze one synthetic set across the omega mesh.
    bool redraw_synthetic = true;
    int max_retries = 3;
    int min_ok = 90;
    EMConfig em;
};

// i.i.d. draws from the prior mixture; deterministic given seed.
std::vector<Vec2> synthesize_prior_samples(const MixtureModel& prior, int n,
                                           std::uint64_t seed);

// Picks the omega from the mesh whose blended fit maximizes held-out
// log-likelihood of real pitches. Mesh points where every fit fails are
// skipped; all failing is an error.
double select_omega(std::span<const Vec2> count_pitches, const MixtureModel& prior,
                    const ShrinkageConfig& config, std::uint64_t seed);

// B replicate fits at the given omega, each with fresh synthetic samples and
// restarts kept by out-of-sample likelihood; xCTRL per replicate over the
// real count pitches, summarized with bootstrap conventions. Falls back to
// the prior (flagged) below the real-pitch floor.
BootstrapSummary shrunken_density(std::span<const Vec2> count_pitches,
                                  const MixtureModel& prior, double omega,
                                  const ShrinkageConfig& config, std::uint64_t seed,
                                  const BinKey& bin = {});

}  // namespace xctrl
