#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "xctrl/types.hpp"

namespace xctrl {

// Column-name mapping with defaults matching Statcast CSV exports.
// Unknown extra columns in the file are ignored.
struct CsvSchema {
    std::string pitcher = "pitcher";
    std::string season = "game_year";
    std::string pitch_type = "pitch_type";
    std::string batter_hand = "stand";
    std::string balls = "balls";
    std::string strikes = "strikes";
    std::string plate_x = "plate_x";
    std::string plate_z = "plate_z";
    std::string run_value_delta = "delta_run_exp";  // optional column
    // Statcast reports feet; everything internal is inches. Disable when
    // the input is already in inches.
    bool convert_feet_to_inches = true;
};

struct IngestResult {
    std::vector<PitchRecord> records;
    std::size_t rows_read = 0;
    std::size_t dropped_missing_location = 0;
    std::size_t dropped_invalid = 0;  // bad hand/season/count fields
};

// Throws DataError on missing file, unmapped required column, or zero valid rows.
IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema);

// Partitions records into bins. Seasons are never mixed. Under Groups mode,
// counts outside every group (3-0, 3-2) and records without count data are
// not assigned to any bin.
std::map<BinKey, BinnedData> bin_pitches(std::span<const PitchRecord> records,
                                         CountBinMode mode);

// Marks fit_mask false for pitches farther than 1.5*IQR from the mean in
// either dimension. Outliers stay in the bin; they are scored later, just
// not used for fitting. Bins with fewer than 4 pitches keep everything.
void apply_iqr_mask(BinnedData& bin);

// Locations of fit-eligible pitches, in bin order.
std::vector<Vec2> fit_points(const BinnedData& bin);
std::vector<Vec2> all_points(const BinnedData& bin);

}  // namespace xctrl
