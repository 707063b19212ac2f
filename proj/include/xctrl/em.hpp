#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "xctrl/gaussian.hpp"
#include "xctrl/types.hpp"

namespace xctrl {

struct EMConfig {
    int k_min = 1;
    int k_max = 6;
    int restarts = 5;
    int max_iter = 500;
    // Convergence: improvement in mean per-point log-likelihood below this.
    double tol = 1e-6;
    // Added to the covariance diagonal each M-step; keeps every fitted
    // covariance eigenvalue at or above this floor (inches^2).
    double cov_floor = 1e-3;
    double split_fraction = 0.8;   // train share for K selection
    // Bins below this many fit-eligible pitches are rejected by select_k.
    std::size_t min_pitches = 250;
    // Validation log-likelihood ties closer than this (per point) go to the
    // smaller K.
    double k_tie_tol = 1e-6;
    bool parallel = true;
};

struct EMFitResult {
    MixtureModel model;
    std::vector<double> loglik_trace;  // mean per-point log-likelihood per iteration
    int iterations = 0;
    bool converged = false;
};

// Weighted EM to convergence. `weights` empty means unit weights; otherwise
// one positive weight per point (scale-invariant: c*w fits identically to w).
// Deterministic given (points, weights, k, seed, config).
// Throws FitError when k < 1, k > points, or all points coincide with k >= 2.
EMFitResult em_fit(std::span<const Vec2> points, int k,
                   std::span<const double> weights, std::uint64_t seed,
                   const EMConfig& config);

// Total weighted log-likelihood of points under the mixture, nats.
double total_loglik(const MixtureModel& model, std::span<const Vec2> points,
                    std::span<const double> weights = {}, bool parallel = true);

// Mean per-point (weight-normalized) log-likelihood.
double mean_loglik(const MixtureModel& model, std::span<const Vec2> points,
                   std::span<const double> weights = {}, bool parallel = true);

struct KSelectionReport {
    int chosen_k = 0;
    std::vector<double> valid_mean_ll;  // per candidate k, NaN where skipped
    std::size_t n_train = 0;
    std::size_t n_valid = 0;
};

// Chooses K by held-out log-likelihood: random train/validation split, R
// restarts per k (best train log-likelihood kept), argmax validation
// log-likelihood with near-tie parsimony, then a refit on all points with
// the chosen K. Throws FitError when points < config.min_pitches.
MixtureModel select_k(std::span<const Vec2> points, std::uint64_t seed,
                      const EMConfig& config, KSelectionReport* report = nullptr);

// EM guarantees a non-decreasing likelihood; every fit checks its own trace
// and counts violations beyond a 1e-8 slack here. The test suites assert
// this stays zero.
std::atomic<std::uint64_t>& em_monotonicity_violations();

}  // namespace xctrl
