#include <algorithm>
#include <cmath>

#include "xctrl/csv.hpp"
#include "xctrl/errors.hpp"
#include "xctrl/ingest.hpp"
#include "xctrl/stats.hpp"

namespace xctrl {

std::string CountGroup::to_string() const {
    switch (kind) {
        case Kind::All: return "all";
        case Kind::Early: return "early";
        case Kind::HitterFriendly: return "hitter_friendly";
        case Kind::PitcherFriendly: return "pitcher_friendly";
        case Kind::Exact: return std::to_string(balls) + "-" + std::to_string(strikes);
    }
    return "all";
}

std::optional<CountGroup> CountGroup::parse(const std::string& text) {
    if (text == "all") return all();
    if (text == "early") return early();
    if (text == "hitter_friendly" || text == "hitter") return hitter_friendly();
    if (text == "pitcher_friendly" || text == "pitcher") return pitcher_friendly();
    if (text.size() == 3 && text[1] == '-' && text[0] >= '0' && text[0] <= '3' &&
        text[2] >= '0' && text[2] <= '2')
        return exact(text[0] - '0', text[2] - '0');
    return std::nullopt;
}

std::optional<CountGroup> count_group_of(int balls, int strikes) {
    // Early: 0-0, 0-1, 1-0, 1-1. Hitter-friendly: 2-0, 2-1, 3-1.
    // Pitcher-friendly: 0-2, 1-2, 2-2. 3-0 and 3-2 belong to no group.
    if (balls <= 1 && strikes <= 1) return CountGroup::early();
    if ((balls == 2 && strikes <= 1) || (balls == 3 && strikes == 1))
        return CountGroup::hitter_friendly();
    if (strikes == 2 && balls <= 2) return CountGroup::pitcher_friendly();
    return std::nullopt;
}

std::string BinKey::to_string() const {
    std::string s = pitcher_id + "|" + std::to_string(season) + "|" + pitch_type + "|";
    s += hand_code(batter_hand);
    if (count_group.kind != CountGroup::Kind::All) s += "|" + count_group.to_string();
    return s;
}

std::string BinKey::file_stem() const {
    std::string s = to_string();
    for (char& c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-';
        if (!ok) c = '_';
    }
    return s;
}

IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    if (!std::filesystem::exists(path)) throw DataError("no such file: " + path.string());
    CsvReader reader(path);

    auto required = [&](const std::string& name) {
        auto idx = reader.column(name);
        if (!idx) throw DataError("column '" + name + "' not found in " + path.string());
        return *idx;
    };
    const std::size_t c_pitcher = required(schema.pitcher);
    const std::size_t c_season = required(schema.season);
    const std::size_t c_type = required(schema.pitch_type);
    const std::size_t c_hand = required(schema.batter_hand);
    const std::size_t c_balls = required(schema.balls);
    const std::size_t c_strikes = required(schema.strikes);
    const std::size_t c_x = required(schema.plate_x);
    const std::size_t c_z = required(schema.plate_z);
    const auto c_rv = reader.column(schema.run_value_delta);

    const double unit = schema.convert_feet_to_inches ? 12.0 : 1.0;

    IngestResult out;
    while (reader.next_row()) {
        const auto& row = reader.row();
        ++out.rows_read;
        auto field = [&](std::size_t i) -> const std::string& {
            static const std::string empty;
            return i < row.size() ? row[i] : empty;
        };

        const auto x = try_parse_double(field(c_x));
        const auto z = try_parse_double(field(c_z));
        if (!x || !z) {
            ++out.dropped_missing_location;
            continue;
        }
        const auto season = try_parse_int(field(c_season));
        const std::string& hand = field(c_hand);
        if (!season || (hand != "L" && hand != "R") || field(c_pitcher).empty()) {
            ++out.dropped_invalid;
            continue;
        }

        PitchRecord rec;
        rec.pitcher_id = field(c_pitcher);
        rec.season = *season;
        rec.pitch_type = field(c_type);
        rec.batter_hand = hand == "L" ? Hand::Left : Hand::Right;
        rec.location = {*x * unit, *z * unit};
        if (auto b = try_parse_int(field(c_balls)); b && *b >= 0 && *b <= 3) rec.balls = *b;
        if (auto s = try_parse_int(field(c_strikes)); s && *s >= 0 && *s <= 2) rec.strikes = *s;
        if (c_rv)
            if (auto rv = try_parse_double(field(*c_rv))) rec.run_value_delta = *rv;
        out.records.push_back(std::move(rec));
    }

    if (out.records.empty()) throw DataError("zero valid rows in " + path.string());
    return out;
}

std::map<BinKey, BinnedData> bin_pitches(std::span<const PitchRecord> records,
                                         CountBinMode mode) {
    std::map<BinKey, BinnedData> bins;
    for (const auto& rec : records) {
        BinKey key{rec.pitcher_id, rec.season, rec.pitch_type, rec.batter_hand,
                   CountGroup::all()};
        if (mode != CountBinMode::All) {
            if (!rec.balls || !rec.strikes) continue;
            if (mode == CountBinMode::Groups) {
                auto group = count_group_of(*rec.balls, *rec.strikes);
                if (!group) continue;  // 3-0 and 3-2 stay unassigned
                key.count_group = *group;
            } else {
                key.count_group = CountGroup::exact(*rec.balls, *rec.strikes);
            }
        }
        auto& bin = bins[key];
        bin.key = key;
        bin.pitches.push_back(rec);
    }
    for (auto& [key, bin] : bins) bin.fit_mask.assign(bin.pitches.size(), 1);
    return bins;
}

void apply_iqr_mask(BinnedData& bin) {
    const std::size_t n = bin.pitches.size();
    bin.fit_mask.assign(n, 1);
    if (n < 4) return;  // quartiles degenerate; leave everything eligible

    std::vector<double> xs(n), zs(n);
    double mx = 0, mz = 0;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = bin.pitches[i].location.x;
        zs[i] = bin.pitches[i].location.z;
        mx += xs[i];
        mz += zs[i];
    }
    mx /= static_cast<double>(n);
    mz /= static_cast<double>(n);

    std::sort(xs.begin(), xs.end());
    std::sort(zs.begin(), zs.end());
    const double iqr_x = percentile_sorted(xs, 75) - percentile_sorted(xs, 25);
    const double iqr_z = percentile_sorted(zs, 75) - percentile_sorted(zs, 25);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = bin.pitches[i].location;
        const bool outlier =
            std::abs(p.x - mx) > 1.5 * iqr_x || std::abs(p.z - mz) > 1.5 * iqr_z;
        bin.fit_mask[i] = outlier ? 0 : 1;
    }
}

std::vector<Vec2> fit_points(const BinnedData& bin) {
    std::vector<Vec2> pts;
    pts.reserve(bin.pitches.size());
    for (std::size_t i = 0; i < bin.pitches.size(); ++i)
        if (bin.fit_mask[i]) pts.push_back(bin.pitches[i].location);
    return pts;
}

std::vector<Vec2> all_points(const BinnedData& bin) {
    std::vector<Vec2> pts;
    pts.reserve(bin.pitches.size());
    for (const auto& p : bin.pitches) pts.push_back(p.location);
    return pts;
}

}  // namespace xctrl
