// xctrl command-line front end: ingest -> fit -> score -> bootstrap -> report,
// plus the count-shrinkage and inning-simulation subcommands.

#include <algorithm>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xctrl/bootstrap.hpp"
#include "xctrl/csv.hpp"
#include "xctrl/errors.hpp"
#include "xctrl/ingest.hpp"
#include "xctrl/parallel.hpp"
#include "xctrl/run_config.hpp"
#include "xctrl/scoring.hpp"
#include "xctrl/shrinkage.hpp"
#include "xctrl/simulator.hpp"

namespace {

using namespace xctrl;

constexpr const char* kVersion = "xctrl 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitFit = 3;

struct SkippedBin {
    std::string bin;
    std::string reason;  // machine-readable code
    std::size_t n_pitches = 0;
    std::size_t n_fit_eligible = 0;
};

struct Manifest {
    std::string command;
    const RunConfig* config = nullptr;
    std::vector<SkippedBin> skipped;
    std::vector<std::string> outputs;

    void add_output(const std::filesystem::path& p) { outputs.push_back(p.string()); }

    void write() const {
        nlohmann::ordered_json j;
        j["tool"] = kVersion;
        j["command"] = command;
        j["seed"] = config->seed;
        auto inputs = nlohmann::ordered_json::array();
        for (const auto& p : config->inputs) inputs.push_back(p.string());
        j["inputs"] = std::move(inputs);
        const std::string canon = config->canonical();
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(canon)));
        j["config_hash"] = hash;
        j["config"] = canon;
        auto sk = nlohmann::ordered_json::array();
        for (const auto& s : skipped)
            sk.push_back({{"bin", s.bin},
                          {"reason", s.reason},
                          {"n_pitches", s.n_pitches},
                          {"n_fit_eligible", s.n_fit_eligible}});
        j["skipped_bins"] = std::move(sk);
        j["outputs"] = outputs;
        atomic_write(config->out_dir / ("manifest_" + command + ".json"), j.dump(2) + "\n");
    }
};

IngestResult ingest_all(const RunConfig& cfg) {
    if (cfg.inputs.empty()) throw ConfigError("no input CSV given (use --input)");
    IngestResult all;
    for (const auto& path : cfg.inputs) {
        auto one = ingest_csv(path, cfg.schema);
        all.rows_read += one.rows_read;
        all.dropped_missing_location += one.dropped_missing_location;
        all.dropped_invalid += one.dropped_invalid;
        std::move(one.records.begin(), one.records.end(), std::back_inserter(all.records));
    }
    std::cerr << "ingested " << all.records.size() << " pitches from " << all.rows_read
              << " rows (" << all.dropped_missing_location << " dropped for missing location, "
              << all.dropped_invalid << " invalid)\n";
    return all;
}

std::map<BinKey, BinnedData> load_bins(const RunConfig& cfg) {
    const auto ingested = ingest_all(cfg);
    auto bins = bin_pitches(ingested.records, cfg.count_mode);
    for (auto& [key, bin] : bins) apply_iqr_mask(bin);
    return bins;
}

std::filesystem::path model_path(const RunConfig& cfg, const BinKey& key) {
    return cfg.out_dir / "models" / (key.file_stem() + ".json");
}

MixtureModel fit_bin(const RunConfig& cfg, const BinnedData& bin) {
    const auto pts = fit_points(bin);
    auto model = select_k(pts, derive_seed(cfg.seed, std::string_view("fit"),
                                           fnv1a64(bin.key.to_string())),
                          cfg.em);
    model.bin = bin.key;
    return model;
}

// ---------------------------------------------------------------- fit ----

int cmd_fit(const RunConfig& cfg) {
    Manifest manifest{"fit", &cfg, {}, {}};
    auto bins = load_bins(cfg);

    std::size_t fitted = 0;
    for (const auto& [key, bin] : bins) {
        const std::size_t eligible = bin.n_fit_eligible();
        if (eligible < cfg.em.min_pitches) {
            manifest.skipped.push_back({key.to_string(), "below_min_pitches",
                                        bin.pitches.size(), eligible});
            std::cerr << "skip " << key.to_string() << ": " << eligible
                      << " fit-eligible pitches, below the " << cfg.em.min_pitches
                      << "-pitch threshold\n";
            continue;
        }
        try {
            const auto model = fit_bin(cfg, bin);
            const auto path = model_path(cfg, key);
            save_model(model, path);
            manifest.add_output(path);
            ++fitted;
            std::cerr << "fit " << key.to_string() << ": k=" << model.k() << " on "
                      << model.n_fit << " pitches\n";
        } catch (const FitError& e) {
            manifest.skipped.push_back({key.to_string(), "fit_failed", bin.pitches.size(),
                                        eligible});
            std::cerr << "skip " << key.to_string() << ": " << e.what() << "\n";
        }
    }
    manifest.write();
    if (fitted == 0) throw FitError("no bin met the fitting threshold");
    return kExitOk;
}

// -------------------------------------------------------------- score ----

struct ScoredBin {
    BinKey key;
    double headline = 0;  // bootstrap median, or the point estimate
    double ci_low = 0, ci_high = 0;
    bool has_ci = false;
    int n_ok = 0;
    std::size_t n_pitches = 0;
};

int cmd_score(const RunConfig& cfg) {
    Manifest manifest{"score", &cfg, {}, {}};
    auto bins = load_bins(cfg);

    std::vector<ScoredBin> scored;
    std::map<BinKey, MixtureModel> median_models;
    for (const auto& [key, bin] : bins) {
        const std::size_t eligible = bin.n_fit_eligible();
        if (eligible < cfg.em.min_pitches) {
            manifest.skipped.push_back({key.to_string(), "below_min_pitches",
                                        bin.pitches.size(), eligible});
            continue;
        }
        const auto mpath = model_path(cfg, key);
        std::optional<MixtureModel> model;
        if (std::filesystem::exists(mpath)) {
            model = load_model(mpath);
        } else if (cfg.fit_inline) {
            model = fit_bin(cfg, bin);
        } else {
            throw FitError("no model file for bin " + key.to_string() +
                           " (run `xctrl fit` first or pass --fit-inline)");
        }

        ScoredBin row;
        row.key = key;
        row.n_pitches = bin.pitches.size();
        if (cfg.no_bootstrap) {
            row.headline = score_bin(bin, *model, false, cfg.em.parallel).mean_xctrl;
            median_models.emplace(key, std::move(*model));
        } else {
            auto summary = bootstrap_bin(bin, cfg.bootstrap,
                                         derive_seed(cfg.seed, std::string_view("bootstrap"),
                                                     fnv1a64(key.to_string())));
            row.headline = summary.median_xctrl;
            row.ci_low = summary.ci_low;
            row.ci_high = summary.ci_high;
            row.has_ci = true;
            row.n_ok = summary.n_ok;
            const auto median_path =
                cfg.out_dir / "scores" / "median_models" / (key.file_stem() + ".json");
            save_model(summary.median_model, median_path);
            manifest.add_output(median_path);
            median_models.emplace(key, std::move(summary.median_model));
        }
        scored.push_back(row);
        std::cerr << "scored " << key.to_string() << ": xctrl=" << format_fixed(row.headline, 2)
                  << "\n";

        if (cfg.per_pitch) {
            const auto& scoring_model = median_models.at(key);
            const auto detail = score_bin(bin, scoring_model, true, cfg.em.parallel);
            std::string csv = "pitch_index,x_in,z_in,xctrl_in,was_fit_outlier\n";
            for (std::size_t i = 0; i < detail.per_pitch->size(); ++i) {
                const auto& ps = (*detail.per_pitch)[i];
                csv += std::to_string(i) + "," + format_double(ps.posterior.pitch.x) + "," +
                       format_double(ps.posterior.pitch.z) + "," + format_double(ps.xctrl) +
                       "," + (ps.was_fit_outlier ? "1" : "0") + "\n";
            }
            const auto path = cfg.out_dir / "scores" / "per_pitch" / (key.file_stem() + ".csv");
            atomic_write(path, csv);
            manifest.add_output(path);
        }
    }
    if (scored.empty()) throw FitError("no bin met the fitting threshold");

    // Per-bin summary CSV.
    {
        std::string csv =
            "pitcher_id,season,pitch_type,batter_hand,count_group,median_xctrl,ci_low,ci_high,"
            "n_replicates_ok,n_pitches\n";
        for (const auto& row : scored) {
            csv += row.key.pitcher_id + "," + std::to_string(row.key.season) + "," +
                   row.key.pitch_type + "," + hand_code(row.key.batter_hand) + "," +
                   row.key.count_group.to_string() + "," + format_double(row.headline) + ",";
            csv += row.has_ci ? format_double(row.ci_low) : std::string();
            csv += ",";
            csv += row.has_ci ? format_double(row.ci_high) : std::string();
            csv += "," + std::to_string(row.n_ok) + "," + std::to_string(row.n_pitches) + "\n";
        }
        const auto path = cfg.out_dir / "scores" / "bins.csv";
        atomic_write(path, csv);
        manifest.add_output(path);
    }

    // Handedness-averaged rankings per pitcher/season/pitch type.
    struct Sides {
        std::optional<ScoredBin> left, right;
    };
    std::map<std::tuple<std::string, int, std::string>, Sides> grouped;
    for (const auto& row : scored) {
        auto& sides = grouped[{row.key.pitcher_id, row.key.season, row.key.pitch_type}];
        (row.key.batter_hand == Hand::Left ? sides.left : sides.right) = row;
    }
    std::vector<RankingRow> rows;
    for (const auto& [group, sides] : grouped) {
        RankingRow r;
        r.pitcher_id = std::get<0>(group);
        r.season = std::get<1>(group);
        r.pitch_type = std::get<2>(group);
        auto to_score = [](const ScoredBin& s) {
            BinScore b;
            b.bin = s.key;
            b.mean_xctrl = s.headline;
            b.n_scored = s.n_pitches;
            return b;
        };
        const auto overall = pitcher_overall(
            sides.left ? std::optional<BinScore>(to_score(*sides.left)) : std::nullopt,
            sides.right ? std::optional<BinScore>(to_score(*sides.right)) : std::nullopt,
            cfg.weighted_overall);
        r.xctrl = overall.xctrl;
        r.partial = overall.partial;
        r.n = (sides.left ? sides.left->n_pitches : 0) +
              (sides.right ? sides.right->n_pitches : 0);
        r.has_ci = (sides.left ? sides.left->has_ci : true) &&
                   (sides.right ? sides.right->has_ci : true);
        if (r.has_ci) {
            if (sides.left && sides.right) {
                r.ci_low = 0.5 * (sides.left->ci_low + sides.right->ci_low);
                r.ci_high = 0.5 * (sides.left->ci_high + sides.right->ci_high);
            } else {
                const auto& s = sides.left ? *sides.left : *sides.right;
                r.ci_low = s.ci_low;
                r.ci_high = s.ci_high;
            }
        }
        rows.push_back(std::move(r));
    }
    rows = rank_rows(std::move(rows));
    {
        std::string csv = "pitcher_id,season,pitch_type,xctrl_in,ci_low,ci_high,n,partial\n";
        for (const auto& r : rows) {
            csv += r.pitcher_id + "," + std::to_string(r.season) + "," + r.pitch_type + "," +
                   format_fixed(r.xctrl, 2) + ",";
            csv += r.has_ci ? format_fixed(r.ci_low, 2) : std::string();
            csv += ",";
            csv += r.has_ci ? format_fixed(r.ci_high, 2) : std::string();
            csv += "," + std::to_string(r.n) + "," + (r.partial ? "1" : "0") + "\n";
        }
        const auto path = cfg.out_dir / "scores" / "rankings.csv";
        atomic_write(path, csv);
        manifest.add_output(path);
    }
    manifest.write();
    return kExitOk;
}

// ------------------------------------------------------------ heatmap ----

struct BinSelector {
    std::string pitcher;
    int season = 0;
    std::string pitch_type;
    std::string hand = "R";
    std::string count_group = "all";

    BinKey key() const {
        BinKey k;
        k.pitcher_id = pitcher;
        k.season = season;
        k.pitch_type = pitch_type;
        if (hand != "L" && hand != "R") throw ConfigError("--hand must be L or R");
        k.batter_hand = hand == "L" ? Hand::Left : Hand::Right;
        auto group = CountGroup::parse(count_group);
        if (!group)
            throw ConfigError("bad count group '" + count_group +
                              "' (all|early|hitter|pitcher|B-S)");
        k.count_group = *group;
        return k;
    }
};

int cmd_heatmap(const RunConfig& cfg, const BinSelector& sel, int resolution,
                std::optional<double> x_min, std::optional<double> x_max,
                std::optional<double> z_min, std::optional<double> z_max) {
    Manifest manifest{"heatmap", &cfg, {}, {}};
    const BinKey key = sel.key();
    const auto mpath = model_path(cfg, key);
    if (!std::filesystem::exists(mpath))
        throw DataError("unknown bin: no model at " + mpath.string());
    const auto model = load_model(mpath);

    // Default window: the strike zone padded by one zone width/height margin.
    const double margin_x = (cfg.zone.right - cfg.zone.left) * 0.5;
    const double margin_z = (cfg.zone.top - cfg.zone.bottom) * 0.5;
    const double gx0 = x_min.value_or(cfg.zone.left - margin_x);
    const double gx1 = x_max.value_or(cfg.zone.right + margin_x);
    const double gz0 = z_min.value_or(cfg.zone.bottom - margin_z);
    const double gz1 = z_max.value_or(cfg.zone.top + margin_z);

    const auto grid = density_grid(model, gx0, gx1, gz0, gz1, resolution, cfg.em.parallel);

    std::string csv = "x_in,z_in,density\n";
    for (int ix = 0; ix < grid.resolution; ++ix) {
        for (int iz = 0; iz < grid.resolution; ++iz) {
            const Vec2 c = grid.cell_center(ix, iz);
            csv += format_double(c.x) + "," + format_double(c.z) + "," +
                   format_double(grid.value_at(ix, iz)) + "\n";
        }
    }
    const auto grid_path = cfg.out_dir / "grids" / (key.file_stem() + ".csv");
    atomic_write(grid_path, csv);
    manifest.add_output(grid_path);

    nlohmann::ordered_json zone = {{"left", cfg.zone.left},
                                   {"right", cfg.zone.right},
                                   {"bottom", cfg.zone.bottom},
                                   {"top", cfg.zone.top}};
    const auto zone_path = cfg.out_dir / "grids" / (key.file_stem() + ".zone.json");
    atomic_write(zone_path, zone.dump(2) + "\n");
    manifest.add_output(zone_path);
    manifest.write();
    return kExitOk;
}

// ------------------------------------------------------------- shrink ----

int cmd_shrink(const RunConfig& cfg, const BinSelector& sel) {
    Manifest manifest{"shrink", &cfg, {}, {}};
    const BinKey count_key = sel.key();
    if (count_key.count_group.kind == CountGroup::Kind::All)
        throw ConfigError("shrink needs a count group (early|hitter|pitcher|B-S)");
    BinKey parent_key = count_key;
    parent_key.count_group = CountGroup::all();

    // Count-agnostic prior for the parent bin.
    const auto parent_path = model_path(cfg, parent_key);
    std::optional<MixtureModel> prior;
    const auto ingested = ingest_all(cfg);
    if (std::filesystem::exists(parent_path)) {
        prior = load_model(parent_path);
    } else if (cfg.fit_inline) {
        auto parent_bins = bin_pitches(ingested.records, CountBinMode::All);
        auto it = parent_bins.find(parent_key);
        if (it == parent_bins.end())
            throw DataError("no pitches for parent bin " + parent_key.to_string());
        apply_iqr_mask(it->second);
        prior = fit_bin(cfg, it->second);
    } else {
        throw FitError("no count-agnostic model for " + parent_key.to_string() +
                       " (run `xctrl fit` first or pass --fit-inline)");
    }

    // Count-specific pitches.
    const auto mode = count_key.count_group.kind == CountGroup::Kind::Exact
                          ? CountBinMode::Exact
                          : CountBinMode::Groups;
    auto count_bins = bin_pitches(ingested.records, mode);
    const auto it = count_bins.find(count_key);
    if (it == count_bins.end())
        throw DataError("no pitches for count bin " + count_key.to_string());
    const auto pitches = all_points(it->second);

    double omega = cfg.shrinkage.omega_mesh.size() == 1 ? cfg.shrinkage.omega_mesh.front() : 0.0;
    const bool passthrough_only = pitches.size() < cfg.shrinkage.min_real_pitches;
    if (cfg.shrinkage.omega_mesh.size() > 1 && !passthrough_only) {
        omega = select_omega(pitches, *prior, cfg.shrinkage,
                             derive_seed(cfg.seed, std::string_view("omega"),
                                         fnv1a64(count_key.to_string())));
    } else if (passthrough_only) {
        omega = cfg.shrinkage.omega_mesh.back();
    }
    const auto summary = shrunken_density(pitches, *prior, omega, cfg.shrinkage,
                                          derive_seed(cfg.seed, std::string_view("shrinkage"),
                                                      fnv1a64(count_key.to_string())),
                                          count_key);

    const auto model_out = cfg.out_dir / "models" / (count_key.file_stem() + "_shrunken.json");
    save_model(summary.median_model, model_out);
    manifest.add_output(model_out);

    nlohmann::ordered_json j;
    j["bin"] = count_key.to_string();
    j["omega"] = *summary.omega;
    j["n_synthetic"] = *summary.n_synthetic;
    j["n_real_pitches"] = pitches.size();
    j["prior_passthrough"] = summary.prior_passthrough;
    j["median_xctrl"] = summary.median_xctrl;
    j["ci_low"] = summary.ci_low;
    j["ci_high"] = summary.ci_high;
    j["n_replicates_ok"] = summary.n_ok;
    j["model_file"] = model_out.string();
    const auto summary_path =
        cfg.out_dir / "scores" / (count_key.file_stem() + "_shrink.json");
    atomic_write(summary_path, j.dump(2) + "\n");
    manifest.add_output(summary_path);

    std::cerr << "shrink " << count_key.to_string() << ": omega=" << format_double(omega)
              << (summary.prior_passthrough ? " (prior passthrough)" : "") << "\n";
    manifest.write();
    return kExitOk;
}

// ----------------------------------------------------------- simulate ----

int cmd_simulate(const RunConfig& cfg, const std::string& zone_csv,
                 const std::vector<double>& sigmas, double sigma_true,
                 const std::vector<double>& sigma_believed) {
    Manifest manifest{"simulate", &cfg, {}, {}};

    ZoneOutcomeModel zones = ZoneOutcomeModel::with_zone_geometry(
        cfg.zone.left, cfg.zone.right, cfg.zone.bottom, cfg.zone.top);
    if (!zone_csv.empty()) {
        const auto loaded = ZoneOutcomeModel::load_csv(zone_csv);
        zones.probs = loaded.probs;
    } else {
        zones.probs = ZoneOutcomeModel::synthetic_default().probs;
    }
    zones.validate();

    const auto curve = run_curve(zones, sigmas, cfg.sim.innings,
                                 derive_seed(cfg.seed, std::string_view("run_curve")), cfg.sim);
    {
        std::string csv = "sigma,mean_runs,stderr\n";
        for (const auto& p : curve)
            csv += format_double(p.sigma) + "," + format_double(p.mean_runs) + "," +
                   format_double(p.std_error) + "\n";
        const auto path = cfg.out_dir / "sim" / "run_curve.csv";
        atomic_write(path, csv);
        manifest.add_output(path);
    }

    const auto loss = belief_loss_curve(zones, sigma_true, sigma_believed, cfg.sim.innings,
                                        derive_seed(cfg.seed, std::string_view("loss_curve")),
                                        cfg.sim);
    {
        std::string csv = "sigma_believed,loss,stderr\n";
        for (const auto& p : loss)
            csv += format_double(p.sigma_believed) + "," + format_double(p.loss) + "," +
                   format_double(p.std_error) + "\n";
        const auto path = cfg.out_dir / "sim" / "loss_curve.csv";
        atomic_write(path, csv);
        manifest.add_output(path);
    }
    manifest.write();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pitch intent modeling and control scoring"};
    app.fallthrough();

    RunConfig cfg;
    std::string config_file;
    auto* seed_opt = app.add_option("--seed", cfg.seed,
                                    "RNG seed (required; runs are reproducible bit-for-bit)");
    app.add_option("--config", config_file, "key = value config file; overrides flags");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)");

    std::vector<std::string> inputs;
    auto add_common_data_opts = [&](CLI::App* sub) {
        sub->add_option("--input", inputs, "input pitch CSV (repeatable)");
        sub->add_option_function<std::string>(
            "--count-mode",
            [&](std::string m) { cfg.apply("count_mode", m); },
            "count binning: all|groups|exact (default all)");
        sub->add_option("--min-pitches", cfg.em.min_pitches, "fitting threshold per bin");
        sub->add_option("--k-max", cfg.em.k_max, "largest candidate component count");
        sub->add_flag_function(
            "--already-inches",
            [&](std::int64_t) { cfg.schema.convert_feet_to_inches = false; },
            "locations are already inches; skip the feet conversion");
    };

    auto* fit = app.add_subcommand("fit", "fit intent mixtures per qualifying bin");
    add_common_data_opts(fit);

    auto* score = app.add_subcommand("score", "bootstrap xCTRL scores and rankings");
    add_common_data_opts(score);
    score->add_flag("--no-bootstrap", cfg.no_bootstrap, "point estimates, empty CI columns");
    score->add_flag("--fit-inline", cfg.fit_inline, "fit missing models on the fly");
    score->add_flag("--per-pitch", cfg.per_pitch, "write per-pitch score files");
    score->add_flag("--weighted-overall", cfg.weighted_overall,
                    "weight the L/R average by pitch count");
    score->add_option("--replicates", cfg.bootstrap.replicates, "bootstrap replicates");
    score->add_flag_function(
        "--score-resampled",
        [&](std::int64_t) { cfg.bootstrap.score_original = false; },
        "score each resample instead of the original pitches");

    BinSelector sel;
    auto add_bin_opts = [&](CLI::App* sub) {
        sub->add_option("--pitcher", sel.pitcher, "pitcher id")->required();
        sub->add_option("--season", sel.season, "season year")->required();
        sub->add_option("--pitch-type", sel.pitch_type, "pitch type code")->required();
        sub->add_option("--hand", sel.hand, "batter hand L|R")->required();
    };

    auto* heatmap = app.add_subcommand("heatmap", "density grid for one bin's model");
    add_bin_opts(heatmap);
    heatmap->add_option("--count-group", sel.count_group, "all|early|hitter|pitcher|B-S");
    int resolution = 50;
    std::optional<double> hx0, hx1, hz0, hz1;
    heatmap->add_option("--resolution", resolution, "grid cells per axis (default 50)");
    heatmap->add_option("--x-min", hx0, "window left, inches");
    heatmap->add_option("--x-max", hx1, "window right, inches");
    heatmap->add_option("--z-min", hz0, "window bottom, inches");
    heatmap->add_option("--z-max", hz1, "window top, inches");

    auto* shrink = app.add_subcommand("shrink", "count-specific density via prior shrinkage");
    add_bin_opts(shrink);
    shrink->add_option("--count-group", sel.count_group, "early|hitter|pitcher|B-S")
        ->required();
    shrink->add_option("--input", inputs, "input pitch CSV (repeatable)");
    shrink->add_flag("--fit-inline", cfg.fit_inline, "fit the parent model if missing");
    shrink->add_option_function<std::string>(
        "--omega-mesh", [&](std::string m) { cfg.apply("shrink.omega_mesh", m); },
        "comma-separated omega values in (0,1)");
    shrink->add_option("--n-synthetic", cfg.shrinkage.n_synthetic, "synthetic prior draws");
    shrink->add_option("--replicates", cfg.shrinkage.replicates, "density replicates (B)");

    auto* simulate = app.add_subcommand("simulate", "run and belief-loss curves");
    std::string zone_csv;
    std::string sigmas_text = "1,2,4,6,8";
    double sigma_true = 4.0;
    std::string sigma_believed_text = "2,4,8";
    simulate->add_option("--zone-csv", zone_csv,
                         "5x5 outcome model CSV (default: built-in synthetic model)");
    simulate->add_option("--sigmas", sigmas_text, "run-curve sigma list, inches");
    simulate->add_option("--sigma-t", sigma_true, "true control noise, inches");
    simulate->add_option("--sigma-f", sigma_believed_text, "believed control list, inches");
    simulate->add_option("--innings", cfg.sim.innings, "innings per curve point");
    simulate->add_option("--rollouts", cfg.sim.rollouts_per_state,
                         "policy rollout budget per state");
    simulate->add_option("--sweeps", cfg.sim.policy_sweeps, "policy improvement sweeps");

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
        const bool seed_given = seed_opt->count() > 0;
        for (const auto& p : inputs) cfg.inputs.emplace_back(p);
        if (!config_file.empty()) load_config_file(cfg, config_file);
        if (!seed_given && !cfg.seed_set)
            throw ConfigError("a seed is required (--seed or `seed =` in the config file)");
        cfg.sync_nested();
        set_threads(cfg.threads);

        if (app.got_subcommand(fit)) return cmd_fit(cfg);
        if (app.got_subcommand(score)) return cmd_score(cfg);
        if (app.got_subcommand(heatmap))
            return cmd_heatmap(cfg, sel, resolution, hx0, hx1, hz0, hz1);
        if (app.got_subcommand(shrink)) return cmd_shrink(cfg, sel);
        if (app.got_subcommand(simulate))
            return cmd_simulate(cfg, zone_csv, parse_double_list(sigmas_text), sigma_true,
                                parse_double_list(sigma_believed_text));
        throw ConfigError("no subcommand given");
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitFit;
    }
}
