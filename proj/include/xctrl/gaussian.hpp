#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xctrl/rng.hpp"
#include "xctrl/types.hpp"

namespace xctrl {

// Symmetric 2x2 covariance, inches^2.
struct Cov2 {
    double xx = 1.0;
    double xz = 0.0;
    double zz = 1.0;

    double det() const { return xx * zz - xz * xz; }
    double min_eigenvalue() const;
    bool positive_definite() const { return xx > 0.0 && det() > 0.0; }
};

struct GaussianComponent {
    double weight = 1.0;  // pi_k, in (0, 1]
    Vec2 mean;            // target center, inches
    Cov2 cov;             // target shape

    double log_pdf(Vec2 p) const;
};

inline double gaussian_pdf(Vec2 p, const GaussianComponent& c) {
    return std::exp(c.log_pdf(p));
}

// A pitcher's intent distribution for one bin: K weighted bivariate
// Gaussians, components in descending-weight order.
struct MixtureModel {
    std::vector<GaussianComponent> components;
    BinKey bin;
    std::size_t n_fit = 0;
    double train_loglik = 0.0;  // total nats over the fitting data
    double valid_loglik = 0.0;  // total nats over the validation split
    std::uint64_t seed = 0;

    int k() const { return static_cast<int>(components.size()); }
    double log_density(Vec2 p) const;
    double density(Vec2 p) const { return std::exp(log_density(p)); }

    // Canonical order: descending weight, ties by mean.
    void sort_components();
    // Throws FitError if weights do not sum to 1 or a covariance is not PD.
    void validate() const;
};

// One draw: component by weight, then the component's bivariate normal.
Vec2 sample(const MixtureModel& model, Rng& rng);

// JSON text serialization; round-trips doubles exactly.
std::string model_to_json(const MixtureModel& model);
MixtureModel model_from_json(const std::string& text);
void save_model(const MixtureModel& model, const std::filesystem::path& path);
MixtureModel load_model(const std::filesystem::path& path);

}  // namespace xctrl
