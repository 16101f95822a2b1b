#include "thermo/lattice.hpp"

#include <algorithm>
#include <numeric>

#include "thermo/errors.hpp"

namespace thermo {

Point Point::of(std::initializer_list<std::int64_t> v) {
    if (v.size() > kMaxDim) throw InputError("point has too many coordinates");
    Point p;
    int i = 0;
    for (auto x : v) p.c[i++] = x;
    return p;
}

Point Point::fill(int dim, std::int64_t value) {
    Point p;
    for (int i = 0; i < dim; ++i) p.c[i] = value;
    return p;
}

Point Point::operator+(const Point& o) const {
    Point r;
    for (int i = 0; i < kMaxDim; ++i) r.c[i] = c[i] + o.c[i];
    return r;
}

Point Point::operator-(const Point& o) const {
    Point r;
    for (int i = 0; i < kMaxDim; ++i) r.c[i] = c[i] - o.c[i];
    return r;
}

std::int64_t Point::norm_inf(int dim) const {
    std::int64_t m = 0;
    for (int i = 0; i < dim; ++i) m = std::max(m, c[i] < 0 ? -c[i] : c[i]);
    return m;
}

std::string Point::str(int dim) const {
    std::string s = "(";
    for (int i = 0; i < dim; ++i) {
        if (i) s += ",";
        s += std::to_string(c[i]);
    }
    return s + ")";
}

std::size_t PointHash::operator()(const Point& p) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : p.c) {
        h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

Box Box::cube(int dim, std::int64_t lo, std::int64_t side) {
    Box b;
    b.dim = dim;
    b.lo = Point::fill(dim, lo);
    b.size = Point::fill(dim, side);
    return b;
}

std::int64_t Box::volume() const {
    std::int64_t v = 1;
    for (int i = 0; i < dim; ++i) v *= std::max<std::int64_t>(size[i], 0);
    return v;
}

Point Box::hi() const {
    Point h = lo;
    for (int i = 0; i < dim; ++i) h[i] = lo[i] + size[i] - 1;
    return h;
}

bool Box::contains(const Point& p) const {
    for (int i = 0; i < dim; ++i)
        if (p[i] < lo[i] || p[i] >= lo[i] + size[i]) return false;
    return true;
}

bool Box::contains(const Box& b) const {
    if (b.empty()) return true;
    for (int i = 0; i < dim; ++i)
        if (b.lo[i] < lo[i] || b.lo[i] + b.size[i] > lo[i] + size[i]) return false;
    return true;
}

bool Box::empty() const {
    for (int i = 0; i < dim; ++i)
        if (size[i] <= 0) return true;
    return false;
}

std::int64_t Box::index(const Point& p) const {
    std::int64_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * size[i] + (p[i] - lo[i]);
    return idx;
}

Point Box::point(std::int64_t index) const {
    Point p;
    for (int i = dim - 1; i >= 0; --i) {
        p[i] = lo[i] + index % size[i];
        index /= size[i];
    }
    return p;
}

Box Box::translated(const Point& v) const {
    Box b = *this;
    b.lo = lo + v;
    return b;
}

Box Box::intersect(const Box& o) const {
    Box b;
    b.dim = dim;
    for (int i = 0; i < dim; ++i) {
        std::int64_t l = std::max(lo[i], o.lo[i]);
        std::int64_t h = std::min(lo[i] + size[i], o.lo[i] + o.size[i]);
        b.lo[i] = l;
        b.size[i] = std::max<std::int64_t>(h - l, 0);
    }
    return b;
}

Grid::Grid(const Box& b, Symbol fill) : box(b), cells(static_cast<std::size_t>(b.volume()), fill) {}

Grid Grid::crop(const Box& b) const {
    Grid g(b);
    for (std::int64_t k = 0; k < b.volume(); ++k) g.cells[k] = at(b.point(k));
    return g;
}

Grid Grid::translated(const Point& v) const {
    Grid g = *this;
    g.box.lo = box.lo + v;
    return g;
}

std::string Grid::str(const std::vector<std::string>& names) const {
    std::string s;
    std::int64_t row = box.dim == 1 ? box.volume() : box.size[box.dim - 1];
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k && row && k % row == 0) s += "\n";
        s += names.at(cells[k]);
    }
    return s;
}

Pattern::Pattern(int dim, std::vector<Point> offsets, std::vector<Symbol> symbols) : dim_(dim) {
    if (offsets.size() != symbols.size()) throw InputError("pattern offsets and cells differ in length");
    if (offsets.empty()) throw InputError("pattern shape is empty");
    std::vector<std::size_t> order(offsets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return offsets[a] < offsets[b]; });
    for (auto k : order) {
        if (!offsets_.empty() && offsets_.back() == offsets[k]) throw InputError("pattern has a repeated offset");
        offsets_.push_back(offsets[k]);
        symbols_.push_back(symbols[k]);
    }
}

Pattern Pattern::from_grid(const Grid& g) {
    Pattern p;
    p.dim_ = g.box.dim;
    p.offsets_.reserve(g.cells.size());
    for (std::int64_t k = 0; k < g.box.volume(); ++k) p.offsets_.push_back(g.box.point(k));
    p.symbols_ = g.cells;
    if (p.offsets_.empty()) throw InputError("pattern shape is empty");
    return p;
}

Pattern Pattern::word(const std::vector<Symbol>& w, std::int64_t origin) {
    Box b;
    b.dim = 1;
    b.lo[0] = origin;
    b.size[0] = static_cast<std::int64_t>(w.size());
    Grid g(b);
    g.cells = w;
    return from_grid(g);
}

Box Pattern::bounding_box() const {
    Box b;
    b.dim = dim_;
    if (offsets_.empty()) return b;
    Point lo = offsets_.front(), hi = offsets_.front();
    for (const auto& p : offsets_)
        for (int i = 0; i < dim_; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    b.lo = lo;
    for (int i = 0; i < dim_; ++i) b.size[i] = hi[i] - lo[i] + 1;
    return b;
}

bool Pattern::is_box() const {
    return bounding_box().volume() == static_cast<std::int64_t>(offsets_.size());
}

Grid Pattern::to_grid(std::vector<bool>* mask) const {
    Box b = bounding_box();
    Grid g(b);
    if (mask) mask->assign(static_cast<std::size_t>(b.volume()), false);
    for (std::size_t k = 0; k < offsets_.size(); ++k) {
        auto idx = b.index(offsets_[k]);
        g.cells[idx] = symbols_[k];
        if (mask) (*mask)[idx] = true;
    }
    return g;
}

Pattern Pattern::translated(const Point& v) const {
    Pattern p = *this;
    for (auto& o : p.offsets_) o = o + v;
    return p;
}

Pattern Pattern::restrict_to(const Box& b) const {
    std::vector<Point> o;
    std::vector<Symbol> s;
    for (std::size_t k = 0; k < offsets_.size(); ++k)
        if (b.contains(offsets_[k])) {
            o.push_back(offsets_[k]);
            s.push_back(symbols_[k]);
        }
    return Pattern(dim_, std::move(o), std::move(s));
}

bool Pattern::canonical_less(const Pattern& o) const {
    if (symbols_ != o.symbols_) return symbols_ < o.symbols_;
    return offsets_ < o.offsets_;
}

void for_each_point(const Box& b, const std::function<void(const Point&)>& f) {
    auto v = b.volume();
    for (std::int64_t k = 0; k < v; ++k) f(b.point(k));
}

}  // namespace thermo
