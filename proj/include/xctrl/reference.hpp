#pragma once

#include <span>
#include <vector>

#include "xctrl/gaussian.hpp"
#include "xctrl/types.hpp"

// Plain serial baselines for the OpenMP kernels. The production code uses
// fixed-block reductions so its results do not depend on thread count; these
// reference versions use the naive summation order instead. Tests compare
// the two paths, and bench/ measures the speedup.
namespace xctrl::ref {

double total_loglik(const MixtureModel& model, std::span<const Vec2> points,
                    std::span<const double> weights = {});

struct Moments {
    double weight_sum = 0;
    Vec2 mean;
    double cov_xx = 0, cov_xz = 0, cov_zz = 0;
};

// Weighted mean and covariance in one naive pass.
Moments weighted_moments(std::span<const Vec2> points, std::span<const double> weights);

// Per-component responsibilities for one point, normalized (no log-space
// tricks; underflows where the direct Bayes fraction underflows).
std::vector<double> responsibilities_direct(Vec2 point, const MixtureModel& model);

double mean_xctrl(const MixtureModel& model, std::span<const Vec2> pitches);

std::vector<double> density_grid(const MixtureModel& model, double x_min, double x_max,
                                 double z_min, double z_max, int resolution);

}  // namespace xctrl::ref
