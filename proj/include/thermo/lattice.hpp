#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace thermo {

constexpr int kMaxDim = 3;
using Symbol = std::uint8_t;

struct Point {
    std::array<std::int64_t, kMaxDim> c{};

    Point() = default;
    static Point of(std::initializer_list<std::int64_t> v);
    static Point fill(int dim, std::int64_t value);

    std::int64_t& operator[](int i) { return c[i]; }
    std::int64_t operator[](int i) const { return c[i]; }
    Point operator+(const Point& o) const;
    Point operator-(const Point& o) const;
    auto operator<=>(const Point&) const = default;
    bool operator==(const Point&) const = default;

    std::int64_t norm_inf(int dim) const;
    std::string str(int dim) const;
};

struct PointHash {
    std::size_t operator()(const Point& p) const noexcept;
};

// Axis-aligned box [lo, lo+size-1] in Z^dim.
struct Box {
    int dim = 1;
    Point lo;
    Point size;

    static Box cube(int dim, std::int64_t lo, std::int64_t side);
    std::int64_t volume() const;
    Point hi() const;  // inclusive upper corner
    bool contains(const Point& p) const;
    bool contains(const Box& b) const;
    bool empty() const;
    // Row-major position of p (axis 0 slowest); p must be inside.
    std::int64_t index(const Point& p) const;
    Point point(std::int64_t index) const;
    Box translated(const Point& v) const;
    Box intersect(const Box& b) const;
    bool operator==(const Box&) const = default;
};

// Dense symbol array on a box, row-major with axis 0 slowest.
struct Grid {
    Box box;
    std::vector<Symbol> cells;

    Grid() = default;
    Grid(const Box& b, Symbol fill = 0);

    Symbol at(const Point& p) const { return cells[box.index(p)]; }
    Symbol& at(const Point& p) { return cells[box.index(p)]; }
    // Copy of the sub-box b (must lie inside this grid).
    Grid crop(const Box& b) const;
    Grid translated(const Point& v) const;
    std::string str(const std::vector<std::string>& names) const;
    bool operator==(const Grid&) const = default;
};

// Finite pattern: symbols on an arbitrary finite shape. Offsets are kept sorted and unique.
class Pattern {
public:
    Pattern() = default;
    Pattern(int dim, std::vector<Point> offsets, std::vector<Symbol> symbols);
    static Pattern from_grid(const Grid& g);
    // 1D word on [origin, origin+|w|-1].
    static Pattern word(const std::vector<Symbol>& w, std::int64_t origin = 0);

    int dim() const { return dim_; }
    std::size_t size() const { return offsets_.size(); }
    const std::vector<Point>& offsets() const { return offsets_; }
    const std::vector<Symbol>& symbols() const { return symbols_; }

    Box bounding_box() const;
    bool is_box() const;
    // Grid on the bounding box plus a mask of which cells are part of the shape.
    Grid to_grid(std::vector<bool>* mask = nullptr) const;
    Pattern translated(const Point& v) const;
    Pattern restrict_to(const Box& b) const;
    bool operator==(const Pattern&) const = default;
    // Canonical order: lexicographic on symbols listed in row-major cell order.
    bool canonical_less(const Pattern& o) const;

private:
    int dim_ = 1;
    std::vector<Point> offsets_;
    std::vector<Symbol> symbols_;
};

// Iterate every point of a box in row-major order.
void for_each_point(const Box& b, const std::function<void(const Point&)>& f);

}  // namespace thermo
