#include "xctrl/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "xctrl/csv.hpp"
#include "xctrl/errors.hpp"

namespace xctrl {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
}

double Cov2::min_eigenvalue() const {
    const double tr = xx + zz;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det()));
    return 0.5 * (tr - disc);
}

double GaussianComponent::log_pdf(Vec2 p) const {
    const double d = cov.det();
    const double dx = p.x - mean.x;
    const double dz = p.z - mean.z;
    // quadratic form through the explicit 2x2 inverse
    const double quad = (cov.zz * dx * dx - 2.0 * cov.xz * dx * dz + cov.xx * dz * dz) / d;
    return -kLog2Pi - 0.5 * std::log(d) - 0.5 * quad;
}

double MixtureModel::log_density(Vec2 p) const {
    constexpr int kStack = 16;
    double stack_lws[kStack];
    const int n = k();
    std::vector<double> heap_lws;
    double* lws = stack_lws;
    if (n > kStack) {
        heap_lws.resize(static_cast<std::size_t>(n));
        lws = heap_lws.data();
    }
    double max_lw = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        lws[i] = std::log(components[i].weight) + components[i].log_pdf(p);
        max_lw = std::max(max_lw, lws[i]);
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(lws[i] - max_lw);
    return max_lw + std::log(s);
}

void MixtureModel::sort_components() {
    std::stable_sort(components.begin(), components.end(),
                     [](const GaussianComponent& a, const GaussianComponent& b) {
                         if (a.weight != b.weight) return a.weight > b.weight;
                         if (a.mean.x != b.mean.x) return a.mean.x < b.mean.x;
                         return a.mean.z < b.mean.z;
                     });
}

void MixtureModel::validate() const {
    if (components.empty()) throw FitError("mixture has no components");
    double total = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0 && c.weight <= 1.0))
            throw FitError("component weight outside (0, 1]");
        if (!c.cov.positive_definite())
            throw FitError("component covariance not positive definite");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw FitError("component weights do not sum to 1");
}

Vec2 sample(const MixtureModel& model, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    const GaussianComponent* chosen = &model.components.back();
    for (const auto& c : model.components) {
        acc += c.weight;
        if (u < acc) {
            chosen = &c;
            break;
        }
    }
    // Cholesky of the 2x2 covariance
    const double l11 = std::sqrt(chosen->cov.xx);
    const double l21 = chosen->cov.xz / l11;
    const double l22 = std::sqrt(std::max(0.0, chosen->cov.zz - l21 * l21));
    auto [e1, e2] = rng.normal_pair();
    return {chosen->mean.x + l11 * e1, chosen->mean.z + l21 * e1 + l22 * e2};
}

namespace {

nlohmann::ordered_json key_to_json(const BinKey& key) {
    return {{"pitcher_id", key.pitcher_id},
            {"season", key.season},
            {"pitch_type", key.pitch_type},
            {"batter_hand", std::string(1, hand_code(key.batter_hand))},
            {"count_group", key.count_group.to_string()}};
}

BinKey key_from_json(const nlohmann::json& j) {
    BinKey key;
    key.pitcher_id = j.at("pitcher_id").get<std::string>();
    key.season = j.at("season").get<int>();
    key.pitch_type = j.at("pitch_type").get<std::string>();
    const auto hand = j.at("batter_hand").get<std::string>();
    if (hand != "L" && hand != "R") throw DataError("bad batter_hand in model file");
    key.batter_hand = hand == "L" ? Hand::Left : Hand::Right;
    auto group = CountGroup::parse(j.at("count_group").get<std::string>());
    if (!group) throw DataError("bad count_group in model file");
    key.count_group = *group;
    return key;
}

}  // namespace

std::string model_to_json(const MixtureModel& model) {
    nlohmann::ordered_json j;
    j["bin"] = key_to_json(model.bin);
    j["k"] = model.k();
    auto comps = nlohmann::ordered_json::array();
    for (const auto& c : model.components) {
        comps.push_back({{"weight", c.weight},
                         {"mean_x", c.mean.x},
                         {"mean_z", c.mean.z},
                         {"cov", {c.cov.xx, c.cov.xz, c.cov.zz}}});
    }
    j["components"] = std::move(comps);
    j["n_fit"] = model.n_fit;
    j["train_loglik"] = model.train_loglik;
    j["valid_loglik"] = model.valid_loglik;
    j["seed"] = model.seed;
    return j.dump(2) + "\n";
}

MixtureModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model parse error: ") + e.what());
    }
    MixtureModel model;
    try {
        model.bin = key_from_json(j.at("bin"));
        for (const auto& cj : j.at("components")) {
            GaussianComponent c;
            c.weight = cj.at("weight").get<double>();
            c.mean = {cj.at("mean_x").get<double>(), cj.at("mean_z").get<double>()};
            const auto& cov = cj.at("cov");
            c.cov = {cov.at(0).get<double>(), cov.at(1).get<double>(), cov.at(2).get<double>()};
            model.components.push_back(c);
        }
        model.n_fit = j.at("n_fit").get<std::size_t>();
        model.train_loglik = j.at("train_loglik").get<double>();
        model.valid_loglik = j.at("valid_loglik").get<double>();
        model.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model field error: ") + e.what());
    }
    if (model.k() != j.at("k").get<int>()) throw DataError("model k mismatch");
    model.validate();
    return model;
}

void save_model(const MixtureModel& model, const std::filesystem::path& path) {
    atomic_write(path, model_to_json(model));
}

MixtureModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace xctrl
