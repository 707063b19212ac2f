#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace xctrl {

// Plate-crossing location in inches: x horizontal (0 = plate center,
// negative = catcher's left), z height above ground.
struct Vec2 {
    double x = 0.0;
    double z = 0.0;
};

inline double euclidean_delta(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dz * dz);
}

enum class Hand : std::uint8_t { Left, Right };

inline char hand_code(Hand h) { return h == Hand::Left ? 'L' : 'R'; }

struct PitchRecord {
    std::string pitcher_id;
    int season = 0;
    std::string pitch_type;
    Hand batter_hand = Hand::Right;
    std::optional<int> balls;    // 0..3 when present
    std::optional<int> strikes;  // 0..2 when present
    Vec2 location;               // inches
    std::optional<double> run_value_delta;  // pass-through, unused by the math
};

// Ball-strike aggregation. Early/HitterFriendly/PitcherFriendly cover the
// standard groups; 3-0 and 3-2 belong to no group and are reachable only
// through Exact.
struct CountGroup {
    enum class Kind : std::uint8_t { All, Early, HitterFriendly, PitcherFriendly, Exact };
    Kind kind = Kind::All;
    int balls = -1;
    int strikes = -1;

    static CountGroup all() { return {}; }
    static CountGroup early() { return {Kind::Early, -1, -1}; }
    static CountGroup hitter_friendly() { return {Kind::HitterFriendly, -1, -1}; }
    static CountGroup pitcher_friendly() { return {Kind::PitcherFriendly, -1, -1}; }
    static CountGroup exact(int b, int s) { return {Kind::Exact, b, s}; }

    friend auto operator<=>(const CountGroup&, const CountGroup&) = default;

    std::string to_string() const;
    static std::optional<CountGroup> parse(const std::string& text);
};

// Maps a count to its group, or nullopt for counts outside every group.
std::optional<CountGroup> count_group_of(int balls, int strikes);

// The covariate tuple an intent model conditions on.
struct BinKey {
    std::string pitcher_id;
    int season = 0;
    std::string pitch_type;
    Hand batter_hand = Hand::Right;
    CountGroup count_group;

    friend auto operator<=>(const BinKey&, const BinKey&) = default;

    std::string to_string() const;   // human-readable, also used for seed derivation
    std::string file_stem() const;   // filesystem-safe
};

enum class CountBinMode : std::uint8_t { All, Groups, Exact };

struct BinnedData {
    BinKey key;
    std::vector<PitchRecord> pitches;       // ingest order, stable
    std::vector<std::uint8_t> fit_mask;     // 1 = used for fitting, 0 = IQR outlier

    std::size_t n_fit_eligible() const {
        std::size_t n = 0;
        for (auto m : fit_mask) n += m != 0;
        return n;
    }
};

}  // namespace xctrl
