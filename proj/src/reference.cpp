#include "xctrl/reference.hpp"

#include <cmath>

#include "xctrl/scoring.hpp"

namespace xctrl::ref {

double total_loglik(const MixtureModel& model, std::span<const Vec2> points,
                    std::span<const double> weights) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        total += w * model.log_density(points[i]);
    }
    return total;
}

Moments weighted_moments(std::span<const Vec2> points, std::span<const double> weights) {
    Moments m;
    double sx = 0, sz = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        m.weight_sum += w;
        sx += w * points[i].x;
        sz += w * points[i].z;
    }
    m.mean = {sx / m.weight_sum, sz / m.weight_sum};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double dx = points[i].x - m.mean.x;
        const double dz = points[i].z - m.mean.z;
        m.cov_xx += w * dx * dx;
        m.cov_xz += w * dx * dz;
        m.cov_zz += w * dz * dz;
    }
    m.cov_xx /= m.weight_sum;
    m.cov_xz /= m.weight_sum;
    m.cov_zz /= m.weight_sum;
    return m;
}

std::vector<double> responsibilities_direct(Vec2 point, const MixtureModel& model) {
    std::vector<double> r(model.components.size());
    double denom = 0.0;
    for (std::size_t j = 0; j < model.components.size(); ++j) {
        const auto& c = model.components[j];
        r[j] = c.weight * gaussian_pdf(point, c);
        denom += r[j];
    }
    for (auto& v : r) v /= denom;
    return r;
}

double mean_xctrl(const MixtureModel& model, std::span<const Vec2> pitches) {
    double sum = 0.0;
    for (const auto& p : pitches) sum += score_pitch(p, model).xctrl;
    return sum / static_cast<double>(pitches.size());
}

std::vector<double> density_grid(const MixtureModel& model, double x_min, double x_max,
                                 double z_min, double z_max, int resolution) {
    std::vector<double> values(static_cast<std::size_t>(resolution) * resolution);
    const double cw = (x_max - x_min) / resolution;
    const double ch = (z_max - z_min) / resolution;
    for (int ix = 0; ix < resolution; ++ix)
        for (int iz = 0; iz < resolution; ++iz)
            values[static_cast<std::size_t>(ix) * resolution + iz] =
                model.density({x_min + (ix + 0.5) * cw, z_min + (iz + 0.5) * ch});
    return values;
}

}  // namespace xctrl::ref
