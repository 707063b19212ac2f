#include "xctrl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "xctrl/csv.hpp"
#include "xctrl/errors.hpp"
#include "xctrl/parallel.hpp"
#include "xctrl/stats.hpp"

namespace xctrl {

const std::array<const char*, kOutcomeCount> kOutcomeNames = {
    "ball", "strike", "foul", "out_in_play", "single", "double", "triple", "home_run"};

Vec2 ZoneOutcomeModel::cell_center(int cell) const {
    const int row = cell / kDim;
    const int col = cell % kDim;
    return {x_min + (col + 0.5) * cell_width(), z_min + (row + 0.5) * cell_height()};
}

std::optional<int> ZoneOutcomeModel::cell_at(Vec2 p) const {
    if (p.x < x_min || p.x >= x_max || p.z < z_min || p.z >= z_max) return std::nullopt;
    const int col = std::min(kDim - 1, static_cast<int>((p.x - x_min) / cell_width()));
    const int row = std::min(kDim - 1, static_cast<int>((p.z - z_min) / cell_height()));
    return row * kDim + col;
}

ZoneOutcomeModel ZoneOutcomeModel::with_zone_geometry(double zone_left, double zone_right,
                                                      double zone_bottom, double zone_top) {
    // The strike zone is the central 3x3; one uniform ring of border cells
    // extends it to 5x5.
    ZoneOutcomeModel z;
    const double cw = (zone_right - zone_left) / 3.0;
    const double ch = (zone_top - zone_bottom) / 3.0;
    z.x_min = zone_left - cw;
    z.x_max = zone_right + cw;
    z.z_min = zone_bottom - ch;
    z.z_max = zone_top + ch;
    return z;
}

ZoneOutcomeModel ZoneOutcomeModel::synthetic_default() {
    ZoneOutcomeModel z = with_zone_geometry(-8.5, 8.5, 18.0, 42.0);
    //                            ball  strike foul  out   1B    2B    3B     HR
    const std::array<double, 8> ring{0.72, 0.16, 0.06, 0.03, 0.02, 0.01, 0.000, 0.000};
    const std::array<double, 8> corner{0.14, 0.34, 0.22, 0.20, 0.06, 0.03, 0.002, 0.008};
    const std::array<double, 8> edge{0.10, 0.27, 0.24, 0.24, 0.09, 0.04, 0.004, 0.016};
    const std::array<double, 8> middle{0.02, 0.17, 0.26, 0.32, 0.13, 0.06, 0.005, 0.035};
    for (int row = 0; row < kDim; ++row) {
        for (int col = 0; col < kDim; ++col) {
            const int cell = row * kDim + col;
            if (row == 0 || row == kDim - 1 || col == 0 || col == kDim - 1) {
                z.probs[cell] = ring;
            } else if (row == 2 && col == 2) {
                z.probs[cell] = middle;
            } else if (row != 2 && col != 2) {
                z.probs[cell] = corner;
            } else {
                z.probs[cell] = edge;
            }
        }
    }
    z.validate();
    return z;
}

void ZoneOutcomeModel::validate() const {
    for (int cell = 0; cell < kCells; ++cell) {
        double sum = 0.0;
        for (double p : probs[cell]) {
            if (p < 0.0)
                throw DataError("zone cell row=" + std::to_string(cell / kDim) +
                                " col=" + std::to_string(cell % kDim) +
                                " has a negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw DataError("zone cell row=" + std::to_string(cell / kDim) +
                            " col=" + std::to_string(cell % kDim) +
                            " outcome probabilities sum to " + format_double(sum));
    }
    if (!(x_max > x_min) || !(z_max > z_min)) throw DataError("zone rectangle is degenerate");
}

ZoneOutcomeModel ZoneOutcomeModel::load_csv(const std::filesystem::path& path) {
    CsvReader reader(path);
    auto need = [&](const std::string& name) {
        auto c = reader.column(name);
        if (!c) throw DataError("zone CSV missing column '" + name + "'");
        return *c;
    };
    const std::size_t c_row = need("row");
    const std::size_t c_col = need("col");
    std::array<std::size_t, kOutcomeCount> c_out{};
    for (int o = 0; o < kOutcomeCount; ++o) c_out[o] = need(kOutcomeNames[o]);

    ZoneOutcomeModel z = with_zone_geometry(-8.5, 8.5, 18.0, 42.0);
    std::array<bool, kCells> seen{};
    std::size_t rows = 0;
    while (reader.next_row()) {
        ++rows;
        const auto& fields = reader.row();
        auto get = [&](std::size_t i) -> const std::string& {
            static const std::string empty;
            return i < fields.size() ? fields[i] : empty;
        };
        const auto row = try_parse_int(get(c_row));
        const auto col = try_parse_int(get(c_col));
        if (!row || !col || *row < 0 || *row >= kDim || *col < 0 || *col >= kDim)
            throw DataError("zone CSV line " + std::to_string(reader.line_number()) +
                            ": bad row/col");
        const int cell = *row * kDim + *col;
        if (seen[cell])
            throw DataError("zone CSV duplicates row=" + std::to_string(*row) +
                            " col=" + std::to_string(*col));
        seen[cell] = true;
        for (int o = 0; o < kOutcomeCount; ++o) {
            const auto p = try_parse_double(get(c_out[o]));
            if (!p)
                throw DataError("zone CSV line " + std::to_string(reader.line_number()) +
                                ": bad probability for " + kOutcomeNames[o]);
            z.probs[cell][o] = *p;
        }
    }
    if (rows != kCells)
        throw DataError("zone CSV has " + std::to_string(rows) + " rows, expected " +
                        std::to_string(kCells));
    z.validate();
    return z;
}

std::string ZoneOutcomeModel::to_csv() const {
    std::string out = "row,col";
    for (const char* name : kOutcomeNames) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (int cell = 0; cell < kCells; ++cell) {
        out += std::to_string(cell / kDim) + "," + std::to_string(cell % kDim);
        for (double p : probs[cell]) out += "," + format_double(p);
        out += '\n';
    }
    return out;
}

GameState GameState::from_index(int idx) {
    GameState s;
    s.strikes = idx % 3;
    idx /= 3;
    s.balls = idx % 4;
    idx /= 4;
    const int mask = idx % 8;
    s.outs = idx / 8;
    s.on_first = (mask & 1) != 0;
    s.on_second = (mask & 2) != 0;
    s.on_third = (mask & 4) != 0;
    return s;
}

Vec2 perturb_target(Vec2 intended, double sigma, Rng& rng) {
    if (sigma == 0.0) return intended;
    auto [ex, ez] = rng.normal_pair();
    return {intended.x + sigma * ex, intended.z + sigma * ez};
}

Outcome sample_outcome(const ZoneOutcomeModel& zones, Vec2 location, Rng& rng) {
    const auto cell = zones.cell_at(location);
    if (!cell) return Outcome::Ball;  // far misses are balls
    const auto& p = zones.probs[*cell];
    const double u = rng.uniform01();
    double acc = 0.0;
    int last_positive = 0;
    for (int o = 0; o < kOutcomeCount; ++o) {
        if (p[o] <= 0.0) continue;
        last_positive = o;
        acc += p[o];
        if (u < acc) return static_cast<Outcome>(o);
    }
    return static_cast<Outcome>(last_positive);
}

namespace {

struct PitchEffect {
    int runs = 0;
    bool pa_ended = false;
};

PitchEffect apply_outcome(Outcome o, GameState& s) {
    PitchEffect eff;
    auto end_pa = [&] {
        s.balls = 0;
        s.strikes = 0;
        eff.pa_ended = true;
    };
    switch (o) {
        case Outcome::Ball:
            if (++s.balls == 4) {
                // walk: runners advance only when forced
                if (s.on_first) {
                    if (s.on_second) {
                        if (s.on_third)
                            ++eff.runs;
                        else
                            s.on_third = true;
                    } else {
                        s.on_second = true;
                    }
                }
                s.on_first = true;
                end_pa();
            }
            break;
        case Outcome::Strike:
            if (++s.strikes == 3) {
                ++s.outs;
                end_pa();
            }
            break;
        case Outcome::Foul:
            if (s.strikes < 2) ++s.strikes;
            break;
        case Outcome::OutInPlay:
            ++s.outs;
            end_pa();
            break;
        case Outcome::Single:
            if (s.on_third) ++eff.runs;
            s.on_third = s.on_second;
            s.on_second = s.on_first;
            s.on_first = true;
            end_pa();
            break;
        case Outcome::Double:
            eff.runs += (s.on_third ? 1 : 0) + (s.on_second ? 1 : 0);
            s.on_third = s.on_first;
            s.on_second = true;
            s.on_first = false;
            end_pa();
            break;
        case Outcome::Triple:
            eff.runs += (s.on_third ? 1 : 0) + (s.on_second ? 1 : 0) + (s.on_first ? 1 : 0);
            s.on_third = true;
            s.on_second = false;
            s.on_first = false;
            end_pa();
            break;
        case Outcome::HomeRun:
            eff.runs += 1 + (s.on_third ? 1 : 0) + (s.on_second ? 1 : 0) + (s.on_first ? 1 : 0);
            s.on_first = s.on_second = s.on_third = false;
            end_pa();
            break;
    }
    return eff;
}

}  // namespace

int rollout_from(GameState state, int first_cell, const Policy& policy,
                 const ZoneOutcomeModel& zones, double sigma, Rng& rng,
                 int plate_appearance_cap) {
    int runs = 0;
    int plate_appearances = 0;
    long pitches = 0;
    const long pitch_cap = static_cast<long>(plate_appearance_cap) * 40;
    bool first = true;
    while (state.outs < 3) {
        const int cell = first ? first_cell : policy[static_cast<std::size_t>(state.index())];
        first = false;
        const Vec2 location = perturb_target(zones.cell_center(cell), sigma, rng);
        const Outcome o = sample_outcome(zones, location, rng);
        const PitchEffect eff = apply_outcome(o, state);
        runs += eff.runs;
        if (eff.pa_ended) ++plate_appearances;
        ++pitches;
        if (state.outs >= 3) break;
        if (plate_appearances >= plate_appearance_cap || pitches >= pitch_cap)
            throw DataError("inning exceeded the plate-appearance cap; "
                            "the zone outcome model looks degenerate");
    }
    return runs;
}

int simulate_inning(const Policy& policy, const ZoneOutcomeModel& zones, double sigma,
                    Rng& rng, int plate_appearance_cap) {
    const GameState start{};
    return rollout_from(start, policy[static_cast<std::size_t>(start.index())], policy,
                        zones, sigma, rng, plate_appearance_cap);
}

Policy optimal_policy(const ZoneOutcomeModel& zones, double sigma, std::uint64_t seed,
                      const SimConfig& config) {
    constexpr int kCells = ZoneOutcomeModel::kCells;
    Policy policy;
    policy.fill(kCells / 2);  // start from "aim middle" everywhere

    const int rolls = std::max(1, config.rollouts_per_state / kCells);
    for (int sweep = 0; sweep < config.policy_sweeps; ++sweep) {
        Policy next{};
        std::array<std::string, kStateCount> errors{};
        parallel_for_dynamic(
            kStateCount,
            [&](std::ptrdiff_t si) {
                try {
                    const GameState state = GameState::from_index(static_cast<int>(si));
                    std::array<long, kCells> total_runs{};
                    for (int t = 0; t < rolls; ++t) {
                        // common random numbers: every candidate cell replays
                        // the same noise stream, so cell comparisons are paired
                        const std::uint64_t roll_seed =
                            derive_seed(seed, std::string_view("rollout"),
                                        std::uint64_t(sweep), std::uint64_t(si),
                                        std::uint64_t(t));
                        for (int cell = 0; cell < kCells; ++cell) {
                            Rng rng(roll_seed);
                            total_runs[static_cast<std::size_t>(cell)] += rollout_from(
                                state, cell, policy, zones, sigma, rng,
                                config.plate_appearance_cap);
                        }
                    }
                    int best_cell = 0;
                    for (int cell = 1; cell < kCells; ++cell)
                        if (total_runs[static_cast<std::size_t>(cell)] <
                            total_runs[static_cast<std::size_t>(best_cell)])
                            best_cell = cell;
                    next[static_cast<std::size_t>(si)] = best_cell;
                } catch (const std::exception& e) {
                    errors[static_cast<std::size_t>(si)] = e.what();
                }
            },
            config.parallel);
        for (const auto& err : errors)
            if (!err.empty()) throw DataError("policy search failed: " + err);
        policy = next;
    }
    return policy;
}

namespace {

struct InningStats {
    double mean = 0;
    double std_error = 0;
};

InningStats summarize_runs(const std::vector<int>& runs) {
    const double n = static_cast<double>(runs.size());
    long sum = 0;
    for (int r : runs) sum += r;
    const double mean = static_cast<double>(sum) / n;
    double ss = 0;
    for (int r : runs) ss += (r - mean) * (r - mean);
    const double sd = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return {mean, sd / std::sqrt(n)};
}

std::vector<int> simulate_many(const Policy& policy, const ZoneOutcomeModel& zones,
                               double sigma, int innings, std::uint64_t seed,
                               const SimConfig& config) {
    std::vector<int> runs(static_cast<std::size_t>(innings));
    std::mutex error_mutex;
    std::string error;
    parallel_for(
        innings,
        [&](std::ptrdiff_t i) {
            try {
                Rng rng(derive_seed(seed, std::string_view("inning"), std::uint64_t(i)));
                runs[static_cast<std::size_t>(i)] =
                    simulate_inning(policy, zones, sigma, rng, config.plate_appearance_cap);
            } catch (const std::exception& e) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (error.empty()) error = e.what();
            }
        },
        config.parallel);
    if (!error.empty()) throw DataError("simulation failed: " + error);
    return runs;
}

}  // namespace

std::vector<CurvePoint> run_curve(const ZoneOutcomeModel& zones,
                                  std::span<const double> sigmas, int innings,
                                  std::uint64_t seed, const SimConfig& config) {
    if (sigmas.empty()) throw ConfigError("run_curve needs at least one sigma");
    std::vector<CurvePoint> curve;
    curve.reserve(sigmas.size());
    for (const double sigma : sigmas) {
        const Policy policy =
            optimal_policy(zones, sigma, derive_seed(seed, std::string_view("policy"), sigma),
                           config);
        const auto runs = simulate_many(policy, zones, sigma, innings,
                                        derive_seed(seed, std::string_view("curve"), sigma),
                                        config);
        const auto stats = summarize_runs(runs);
        curve.push_back({sigma, stats.mean, stats.std_error});
    }
    return curve;
}

std::vector<LossPoint> belief_loss_curve(const ZoneOutcomeModel& zones, double sigma_true,
                                         std::span<const double> sigma_believed,
                                         int innings, std::uint64_t seed,
                                         const SimConfig& config) {
    if (sigma_believed.empty()) throw ConfigError("loss curve needs at least one sigma_F");
    // Policies derive their seed from the sigma value, and innings are paired
    // through a shared seed stream: at sigma_F == sigma_T both simulations
    // are bit-identical and the loss is exactly zero.
    const Policy true_policy = optimal_policy(
        zones, sigma_true, derive_seed(seed, std::string_view("policy"), sigma_true), config);
    const std::uint64_t inning_seed = derive_seed(seed, std::string_view("loss_innings"));
    const auto base_runs =
        simulate_many(true_policy, zones, sigma_true, innings, inning_seed, config);

    std::vector<LossPoint> curve;
    curve.reserve(sigma_believed.size());
    for (const double sigma_f : sigma_believed) {
        const Policy believed_policy = optimal_policy(
            zones, sigma_f, derive_seed(seed, std::string_view("policy"), sigma_f), config);
        const auto runs =
            simulate_many(believed_policy, zones, sigma_true, innings, inning_seed, config);

        std::vector<double> diff(runs.size());
        for (std::size_t i = 0; i < runs.size(); ++i)
            diff[i] = static_cast<double>(runs[i] - base_runs[i]);
        const double loss = mean(diff);
        const double se = runs.size() > 1
                              ? sample_stddev(diff) / std::sqrt(static_cast<double>(runs.size()))
                              : 0.0;
        curve.push_back({sigma_f, loss, se});
    }
    return curve;
}

}  // namespace xctrl
