#include "xctrl/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "xctrl/csv.hpp"
#include "xctrl/errors.hpp"

namespace xctrl {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

double parse_num(const std::string& v, const std::string& key) {
    auto d = try_parse_double(v);
    if (!d) throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
    return *d;
}

int parse_int_checked(const std::string& v, const std::string& key) {
    auto i = try_parse_int(v);
    if (!i) throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
    return *i;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        auto d = try_parse_double(item);
        if (!d) throw ConfigError("bad number in list: '" + item + "'");
        out.push_back(*d);
    }
    if (out.empty()) throw ConfigError("empty number list");
    return out;
}

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "input") {
        inputs.emplace_back(value);
    } else if (key == "out") {
        out_dir = value;
    } else if (key == "seed") {
        auto v = try_parse_double(value);
        if (!v || *v < 0) throw ConfigError("bad seed: '" + value + "'");
        seed = static_cast<std::uint64_t>(*v);
        seed_set = true;
    } else if (key == "count_mode") {
        if (value == "all")
            count_mode = CountBinMode::All;
        else if (value == "groups")
            count_mode = CountBinMode::Groups;
        else if (value == "exact")
            count_mode = CountBinMode::Exact;
        else
            throw ConfigError("count_mode must be all|groups|exact, got '" + value + "'");
    } else if (key == "columns.pitcher") {
        schema.pitcher = value;
    } else if (key == "columns.season") {
        schema.season = value;
    } else if (key == "columns.pitch_type") {
        schema.pitch_type = value;
    } else if (key == "columns.batter_hand") {
        schema.batter_hand = value;
    } else if (key == "columns.balls") {
        schema.balls = value;
    } else if (key == "columns.strikes") {
        schema.strikes = value;
    } else if (key == "columns.plate_x") {
        schema.plate_x = value;
    } else if (key == "columns.plate_z") {
        schema.plate_z = value;
    } else if (key == "columns.run_value_delta") {
        schema.run_value_delta = value;
    } else if (key == "convert_feet_to_inches") {
        schema.convert_feet_to_inches = parse_bool(value, key);
    } else if (key == "min_pitches") {
        em.min_pitches = static_cast<std::size_t>(parse_int_checked(value, key));
    } else if (key == "k_min") {
        em.k_min = parse_int_checked(value, key);
    } else if (key == "k_max") {
        em.k_max = parse_int_checked(value, key);
    } else if (key == "restarts") {
        em.restarts = parse_int_checked(value, key);
    } else if (key == "max_iter") {
        em.max_iter = parse_int_checked(value, key);
    } else if (key == "tol") {
        em.tol = parse_num(value, key);
    } else if (key == "cov_floor") {
        em.cov_floor = parse_num(value, key);
    } else if (key == "split_fraction") {
        em.split_fraction = parse_num(value, key);
    } else if (key == "bootstrap.replicates") {
        bootstrap.replicates = parse_int_checked(value, key);
    } else if (key == "bootstrap.min_ok") {
        bootstrap.min_ok = parse_int_checked(value, key);
    } else if (key == "bootstrap.max_retries") {
        bootstrap.max_retries = parse_int_checked(value, key);
    } else if (key == "bootstrap.score_resampled") {
        bootstrap.score_original = !parse_bool(value, key);
    } else if (key == "shrink.n_synthetic") {
        shrinkage.n_synthetic = parse_int_checked(value, key);
    } else if (key == "shrink.omega_mesh") {
        shrinkage.omega_mesh = parse_double_list(value);
    } else if (key == "shrink.replicates") {
        shrinkage.replicates = parse_int_checked(value, key);
    } else if (key == "shrink.restarts") {
        shrinkage.restarts = parse_int_checked(value, key);
    } else if (key == "shrink.min_real") {
        shrinkage.min_real_pitches = static_cast<std::size_t>(parse_int_checked(value, key));
    } else if (key == "shrink.freeze_synthetic") {
        shrinkage.redraw_synthetic = !parse_bool(value, key);
    } else if (key == "sim.innings") {
        sim.innings = parse_int_checked(value, key);
    } else if (key == "sim.rollouts_per_state") {
        sim.rollouts_per_state = parse_int_checked(value, key);
    } else if (key == "sim.policy_sweeps") {
        sim.policy_sweeps = parse_int_checked(value, key);
    } else if (key == "sim.plate_appearance_cap") {
        sim.plate_appearance_cap = parse_int_checked(value, key);
    } else if (key == "zone.left") {
        zone.left = parse_num(value, key);
    } else if (key == "zone.right") {
        zone.right = parse_num(value, key);
    } else if (key == "zone.bottom") {
        zone.bottom = parse_num(value, key);
    } else if (key == "zone.top") {
        zone.top = parse_num(value, key);
    } else if (key == "per_pitch") {
        per_pitch = parse_bool(value, key);
    } else if (key == "weighted_overall") {
        weighted_overall = parse_bool(value, key);
    } else if (key == "no_bootstrap") {
        no_bootstrap = parse_bool(value, key);
    } else if (key == "fit_inline") {
        fit_inline = parse_bool(value, key);
    } else if (key == "threads") {
        threads = parse_int_checked(value, key);
    } else {
        throw ConfigError("unknown config key: '" + key + "'");
    }
}

void RunConfig::sync_nested() {
    bootstrap.em = em;
    shrinkage.em = em;
    shrinkage.split_fraction = em.split_fraction;
    sim.parallel = em.parallel;
}

std::string RunConfig::canonical() const {
    std::string s;
    auto kv = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    for (const auto& p : inputs) kv("input", p.string());
    kv("out", out_dir.string());
    kv("seed", std::to_string(seed));
    kv("count_mode", count_mode == CountBinMode::All
                         ? "all"
                         : (count_mode == CountBinMode::Groups ? "groups" : "exact"));
    kv("columns.pitcher", schema.pitcher);
    kv("columns.season", schema.season);
    kv("columns.pitch_type", schema.pitch_type);
    kv("columns.batter_hand", schema.batter_hand);
    kv("columns.balls", schema.balls);
    kv("columns.strikes", schema.strikes);
    kv("columns.plate_x", schema.plate_x);
    kv("columns.plate_z", schema.plate_z);
    kv("columns.run_value_delta", schema.run_value_delta);
    kv("convert_feet_to_inches", schema.convert_feet_to_inches ? "true" : "false");
    kv("min_pitches", std::to_string(em.min_pitches));
    kv("k_min", std::to_string(em.k_min));
    kv("k_max", std::to_string(em.k_max));
    kv("restarts", std::to_string(em.restarts));
    kv("max_iter", std::to_string(em.max_iter));
    kv("tol", format_double(em.tol));
    kv("cov_floor", format_double(em.cov_floor));
    kv("split_fraction", format_double(em.split_fraction));
    kv("bootstrap.replicates", std::to_string(bootstrap.replicates));
    kv("bootstrap.min_ok", std::to_string(bootstrap.min_ok));
    kv("bootstrap.max_retries", std::to_string(bootstrap.max_retries));
    kv("bootstrap.score_resampled", bootstrap.score_original ? "false" : "true");
    kv("shrink.n_synthetic", std::to_string(shrinkage.n_synthetic));
    {
        std::string mesh;
        for (double w : shrinkage.omega_mesh) {
            if (!mesh.empty()) mesh += ",";
            mesh += format_double(w);
        }
        kv("shrink.omega_mesh", mesh);
    }
    kv("shrink.replicates", std::to_string(shrinkage.replicates));
    kv("shrink.restarts", std::to_string(shrinkage.restarts));
    kv("shrink.min_real", std::to_string(shrinkage.min_real_pitches));
    kv("shrink.freeze_synthetic", shrinkage.redraw_synthetic ? "false" : "true");
    kv("sim.innings", std::to_string(sim.innings));
    kv("sim.rollouts_per_state", std::to_string(sim.rollouts_per_state));
    kv("sim.policy_sweeps", std::to_string(sim.policy_sweeps));
    kv("sim.plate_appearance_cap", std::to_string(sim.plate_appearance_cap));
    kv("zone.left", format_double(zone.left));
    kv("zone.right", format_double(zone.right));
    kv("zone.bottom", format_double(zone.bottom));
    kv("zone.top", format_double(zone.top));
    kv("per_pitch", per_pitch ? "true" : "false");
    kv("weighted_overall", weighted_overall ? "true" : "false");
    kv("no_bootstrap", no_bootstrap ? "true" : "false");
    kv("fit_inline", fit_inline ? "true" : "false");
    return s;
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                           ": empty key");
        config.apply(key, value);
    }
    config.sync_nested();
}

}  // namespace xctrl
