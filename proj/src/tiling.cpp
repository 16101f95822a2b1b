#include "thermo/tiling.hpp"

#include <algorithm>
#include <map>

#include "thermo/errors.hpp"

namespace thermo {

OdometerOffset::OdometerOffset(int d, Point off, int dep) : dim(d), o(off), depth(dep) {
    if (depth < 0 || depth > 62) throw InputError("odometer depth must be in [0, 62]");
    for (int i = 0; i < dim; ++i)
        if (o[i] < 0 || o[i] >= (std::int64_t(1) << depth)) throw InputError("odometer offset outside [0, 2^depth)");
}

Box OdometerOffset::tile(const Point& j, int n) const {
    if (n > depth) throw UndeterminedError("tile level exceeds odometer depth", n);
    const std::int64_t side = std::int64_t(1) << n;
    Box b{dim, {}, Point::fill(dim, side)};
    for (int i = 0; i < dim; ++i) {
        std::int64_t r = (j[i] - o[i]) % side;
        if (r < 0) r += side;
        b.lo[i] = j[i] - r;
    }
    return b;
}

OdometerOffset OdometerOffset::shifted(const Point& v) const {
    // Tiles of the shifted point are tiles of this point translated by v.
    const std::int64_t mod = std::int64_t(1) << depth;
    Point p = o;
    for (int i = 0; i < dim; ++i) p[i] = ((o[i] + v[i]) % mod + mod) % mod;
    return {dim, p, depth};
}

namespace {

struct LevelCache {
    const Subshift& x;
    const Grid& g;
    std::map<std::pair<int, Point>, bool> ok;
    bool admissible(const Box& b, int n) {
        auto key = std::make_pair(n, b.lo);
        auto it = ok.find(key);
        if (it != ok.end()) return it->second;
        return ok[key] = x.admissible(g.crop(b));
    }
};

int level_with(LevelCache& c, const OdometerOffset& y, const Point& j) {
    if (!c.g.box.contains(j)) throw InputError("cell outside the window");
    if (!c.admissible(y.tile(j, 0), 0)) return 0;
    for (int n = 0;; ++n) {
        if (n + 1 > y.depth) throw UndeterminedError("maximal tile exceeds odometer depth", n);
        Box parent = y.tile(j, n + 1);
        if (!c.g.box.contains(parent)) throw UndeterminedError("parent tile leaves the window", n);
        if (!c.admissible(parent, n + 1)) return n;
    }
}

}  // namespace

int tile_level(const Subshift& x, const Grid& g, const OdometerOffset& y, const Point& j) {
    if (y.dim != x.dim() || g.box.dim != x.dim()) throw InputError("dimension mismatch");
    LevelCache c{x, g, {}};
    return level_with(c, y, j);
}

DyadicTiling tile_decomposition(const Subshift& x, const Grid& g, const OdometerOffset& y) {
    if (y.dim != x.dim() || g.box.dim != x.dim()) throw InputError("dimension mismatch");
    LevelCache c{x, g, {}};
    DyadicTiling t;
    t.window = g.box;
    std::map<Point, Tile> seen;
    for_each_point(g.box, [&](const Point& j) {
        try {
            int n = level_with(c, y, j);
            Box b = y.tile(j, n);
            bool adm = n > 0 || c.admissible(b, 0);
            seen.emplace(b.lo, Tile{b.lo, n, adm});
        } catch (const UndeterminedError&) {
            t.margin.push_back(j);
        }
    });
    for (auto& [o, tile] : seen) t.tiles.push_back(tile);
    return t;
}

nlohmann::json DyadicTiling::to_json() const {
    nlohmann::json j;
    j["window"] = {{"lo", std::vector<std::int64_t>(window.lo.c.begin(), window.lo.c.begin() + window.dim)},
                   {"size", std::vector<std::int64_t>(window.size.c.begin(), window.size.c.begin() + window.dim)}};
    j["tiles"] = nlohmann::json::array();
    for (const auto& t : tiles)
        j["tiles"].push_back({{"origin", std::vector<std::int64_t>(t.origin.c.begin(), t.origin.c.begin() + window.dim)},
                              {"level", t.level},
                              {"admissible", t.admissible}});
    j["margin"] = nlohmann::json::array();
    for (const auto& p : margin) j["margin"].push_back(std::vector<std::int64_t>(p.c.begin(), p.c.begin() + window.dim));
    return j;
}

PinSequence pin_decomposition(const Subshift& x, const std::vector<Symbol>& w) {
    if (x.dim() != 1 || !x.one_sided()) throw InputError("pin decomposition needs a one-sided 1D subshift");
    PinSequence s;
    s.length = static_cast<std::int64_t>(w.size());
    if (w.empty()) return s;
    auto bad = [&](std::int64_t from, std::int64_t len) {
        return !x.admissible(Pattern::word(std::vector<Symbol>(w.begin() + from, w.begin() + from + len)));
    };
    std::int64_t p = 0;
    s.pins.push_back(0);
    std::vector<std::int64_t> gaps;
    while (true) {
        std::int64_t g = 0;
        for (std::int64_t len = 2; p + len <= s.length; len *= 2)
            if (bad(p, len)) {
                g = len / 2;
                break;
            }
        if (g == 0) break;
        gaps.push_back(g);
        p += g;
        s.pins.push_back(p);
    }
    s.determined_end = p;
    s.superpin.assign(s.pins.size(), 0);
    for (std::size_t i = 1; i < gaps.size(); ++i) s.superpin[i] = gaps[i] <= gaps[i - 1];
    return s;
}

nlohmann::json PinSequence::to_json() const {
    nlohmann::json j;
    j["pins"] = pins;
    std::vector<std::int64_t> sp;
    for (std::size_t i = 0; i < pins.size(); ++i)
        if (superpin[i]) sp.push_back(pins[i]);
    j["superpins"] = sp;
    j["determined_end"] = determined_end;
    j["length"] = length;
    return j;
}

}  // namespace thermo
