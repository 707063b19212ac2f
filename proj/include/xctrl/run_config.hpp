#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xctrl/bootstrap.hpp"
#include "xctrl/em.hpp"
#include "xctrl/ingest.hpp"
#include "xctrl/scoring.hpp"
#include "xctrl/shrinkage.hpp"
#include "xctrl/simulator.hpp"

namespace xctrl {

// Everything a CLI run needs. Flags populate this first; a config file, when
// given, overrides flag values key by key.
struct RunConfig {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;  // a config file supplied the seed
    CsvSchema schema;
    CountBinMode count_mode = CountBinMode::All;
    EMConfig em;
    BootstrapConfig bootstrap;
    ShrinkageConfig shrinkage;
    SimConfig sim;
    StrikeZone zone;
    bool per_pitch = false;
    bool weighted_overall = false;
    bool no_bootstrap = false;
    bool fit_inline = false;
    int threads = 0;

    // Applies one key = value pair; throws ConfigError on unknown keys or
    // unparseable values. Key reference lives in the README.
    void apply(const std::string& key, const std::string& value);

    // Keeps the nested EMConfig copies in sync after em is edited.
    void sync_nested();

    // Canonical text dump used for the manifest and its config hash.
    std::string canonical() const;
};

// key = value lines, '#' comments, blank lines ignored.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace xctrl
