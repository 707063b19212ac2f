#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "xctrl/rng.hpp"
#include "xctrl/types.hpp"

namespace xctrl {

enum class Outcome : std::uint8_t {
    Ball = 0,
    Strike,      // called or swinging
    Foul,
    OutInPlay,
    Single,
    Double,
    Triple,
    HomeRun,
};
inline constexpr int kOutcomeCount = 8;
extern const std::array<const char*, kOutcomeCount> kOutcomeNames;

// 5x5 discretized extended strike zone: the strike-zone rectangle is the
// central 3x3, surrounded by one ring of border cells. Each cell carries a
// probability vector over pitch outcomes. Pitches landing outside the
// extended rectangle count as balls.
struct ZoneOutcomeModel {
    static constexpr int kDim = 5;
    static constexpr int kCells = kDim * kDim;

    std::array<std::array<double, kOutcomeCount>, kCells> probs{};  // [row*kDim+col], row 0 = lowest z
    double x_min = 0, x_max = 0, z_min = 0, z_max = 0;

    double cell_width() const { return (x_max - x_min) / kDim; }
    double cell_height() const { return (z_max - z_min) / kDim; }
    Vec2 cell_center(int cell) const;
    std::optional<int> cell_at(Vec2 p) const;  // nullopt outside the grid

    // Extended rectangle built from a strike-zone rectangle plus one cell ring.
    static ZoneOutcomeModel with_zone_geometry(double zone_left, double zone_right,
                                               double zone_bottom, double zone_top);
    // The synthetic model shipped with the repo: central cells favor contact,
    // edges and the outside ring favor balls.
    static ZoneOutcomeModel synthetic_default();

    // CSV: header row, then 25 rows of (row, col, 8 outcome probabilities).
    static ZoneOutcomeModel load_csv(const std::filesystem::path& path);
    std::string to_csv() const;

    // Throws DataError naming the offending row when a probability vector is
    // negative or does not sum to 1.
    void validate() const;
};

// Base-out-count state within an inning.
struct GameState {
    int outs = 0;
    int balls = 0;
    int strikes = 0;
    bool on_first = false;
    bool on_second = false;
    bool on_third = false;

    int index() const {
        const int base_mask = (on_first ? 1 : 0) | (on_second ? 2 : 0) | (on_third ? 4 : 0);
        return ((outs * 8 + base_mask) * 4 + balls) * 3 + strikes;
    }
    static GameState from_index(int idx);
};
inline constexpr int kStateCount = 3 * 8 * 4 * 3;  // 288

// Intended target cell per game state.
using Policy = std::array<int, kStateCount>;

struct SimConfig {
    int innings = 10000;
    // Monte Carlo budget per state when building a policy, split across the
    // 25 candidate cells with common random numbers.
    int rollouts_per_state = 2000;
    int policy_sweeps = 2;
    // Guards degenerate outcome models: an inning exceeding this many
    // completed plate appearances (or 40x this many pitches) is an error.
    int plate_appearance_cap = 500;
    bool parallel = true;
};

// Intended location plus i.i.d. N(0, sigma^2) noise per axis.
Vec2 perturb_target(Vec2 intended, double sigma, Rng& rng);

Outcome sample_outcome(const ZoneOutcomeModel& zones, Vec2 location, Rng& rng);

// Simulates one inning from scratch under the policy; returns runs scored.
int simulate_inning(const Policy& policy, const ZoneOutcomeModel& zones,
                    double sigma, Rng& rng, int plate_appearance_cap = 500);

// Runs scored from a mid-inning state until the third out. The first pitch
// targets `first_cell`; subsequent pitches follow the policy.
int rollout_from(GameState state, int first_cell, const Policy& policy,
                 const ZoneOutcomeModel& zones, double sigma, Rng& rng,
                 int plate_appearance_cap = 500);

// Monte Carlo policy improvement: per state, each candidate cell is scored
// by rollouts (common random numbers across cells) whose continuation
// follows the previous sweep's policy; argmin expected runs wins, ties to
// the lower cell index. Deterministic given seed.
Policy optimal_policy(const ZoneOutcomeModel& zones, double sigma,
                      std::uint64_t seed, const SimConfig& config);

struct CurvePoint {
    double sigma = 0;
    double mean_runs = 0;
    double std_error = 0;
};

// Mean runs per inning under the matched optimal policy for each sigma.
std::vector<CurvePoint> run_curve(const ZoneOutcomeModel& zones,
                                  std::span<const double> sigmas, int innings,
                                  std::uint64_t seed, const SimConfig& config);

struct LossPoint {
    double sigma_believed = 0;
    double loss = 0;       // runs per inning above the true-control policy
    double std_error = 0;  // paired standard error
};

// Loss from pitching under a policy built for believed control sigma_F while
// the real noise is sigma_T. Innings are paired between the believed and
// true policies, so the loss at sigma_F == sigma_T is exactly zero.
std::vector<LossPoint> belief_loss_curve(const ZoneOutcomeModel& zones,
                                         double sigma_true,
                                         std::span<const double> sigma_believed,
                                         int innings, std::uint64_t seed,
                                         const SimConfig& config);

}  // namespace xctrl
