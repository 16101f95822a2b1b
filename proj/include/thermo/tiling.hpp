#pragma once

#include <json.hpp>
#include <vector>

#include "thermo/subshift.hpp"

namespace thermo {

// Finite odometer point: level-n grid lines along axis i sit at o_i mod 2^n, for n <= depth.
struct OdometerOffset {
    int dim = 1;
    Point o;
    int depth = 16;

    OdometerOffset() = default;
    OdometerOffset(int dim, Point o, int depth = 16);
    // Level-n dyadic tile containing j.
    Box tile(const Point& j, int n) const;
    OdometerOffset shifted(const Point& v) const;  // offset of the shifted odometer point
};

// Largest n such that the level-n tile containing j is admissible (0 also when the cell itself is not).
// Throws UndeterminedError when the parent tile needed to witness maximality leaves the window.
int tile_level(const Subshift& x, const Grid& g, const OdometerOffset& y, const Point& j);

struct Tile {
    Point origin;
    int level = 0;
    bool admissible = true;
    bool operator==(const Tile&) const = default;
    auto operator<=>(const Tile&) const = default;
};

struct DyadicTiling {
    Box window;
    std::vector<Tile> tiles;   // sorted by origin
    std::vector<Point> margin; // cells whose level is undetermined inside the window
    nlohmann::json to_json() const;
};

DyadicTiling tile_decomposition(const Subshift& x, const Grid& g, const OdometerOffset& y);

struct PinSequence {
    std::vector<std::int64_t> pins;     // pins[0] = 0
    std::vector<std::uint8_t> superpin; // per pin; only interior pins with a known next gap can be set
    std::int64_t determined_end = 0;    // cells at or beyond this index are in the margin
    std::int64_t length = 0;
    nlohmann::json to_json() const;
};

// Greedy maximal dyadic blocks from a pin at 0 on a one-sided word.
PinSequence pin_decomposition(const Subshift& x, const std::vector<Symbol>& w);

}  // namespace thermo
