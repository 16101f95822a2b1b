#include "thermo/potential.hpp"

#include <cmath>
#include <sstream>

#include "thermo/errors.hpp"
#include "thermo/format.hpp"

namespace thermo {

std::string DistanceExponent::str() const {
    return (exact ? "Exact(" : "AtLeast(") + std::to_string(j) + ")";
}

namespace {

Box window_around(const Subshift& x, const Point& center, std::int64_t r) {
    if (x.one_sided()) return Box{1, center, Point::of({r})};
    Box b = Box::cube(x.dim(), -r, 2 * r + 1);
    return b.translated(center);
}

}  // namespace

DistanceExponent exponent_in_grid(const Subshift& x, const Grid& g, const Point& center, std::int64_t R) {
    if (R < 0) throw InputError("radius must be non-negative");
    const std::int64_t first = x.one_sided() ? 1 : 0;
    if (R < first) return DistanceExponent::AtLeast(R + 1);
    if (!g.box.contains(window_around(x, center, R))) throw InputError("window exceeds the grid");
    auto bad = [&](std::int64_t r) { return !x.admissible(g.crop(window_around(x, center, r))); };
    if (!bad(R)) return DistanceExponent::AtLeast(R + 1);
    // Admissibility is monotone in r, so the first inadmissible radius is found by bisection.
    std::int64_t lo = first - 1, hi = R;
    while (hi - lo > 1) {
        std::int64_t mid = (lo + hi) / 2;
        (bad(mid) ? hi : lo) = mid;
    }
    return DistanceExponent::Exact(hi);
}

DistanceExponent distance_exponent(const Subshift& x, const Pattern& window) {
    if (!window.is_box()) throw InputError("window must be a full box");
    Box b = window.bounding_box();
    std::int64_t R;
    if (x.one_sided()) {
        if (b.lo[0] != 0) throw InputError("one-sided window must start at 0");
        R = b.size[0];
    } else {
        R = (b.size[0] - 1) / 2;
        if (b != Box::cube(x.dim(), -R, 2 * R + 1)) throw InputError("window must be a centered box");
    }
    return exponent_in_grid(x, window.to_grid(), Point{}, R);
}

TruncatedPotential::TruncatedPotential(std::shared_ptr<const Subshift> x, FreezingSequence seq, std::int64_t R)
    : x_(std::move(x)), seq_(std::move(seq)), R_(R) {
    if (R_ < 0) throw InputError("truncation radius must be non-negative");
}

Box TruncatedPotential::window_box() const {
    return x_->one_sided() ? BoxWindow::prefix(R_).box() : BoxWindow::stat(x_->dim(), R_).box();
}

double TruncatedPotential::eval(const Pattern& window) const {
    if (!window.is_box() || window.bounding_box() != window_box())
        throw InputError("window does not match the truncation radius " + std::to_string(R_));
    return value(distance_exponent(*x_, window));
}

double InteractionFamily::value(const Subshift& x, const Pattern& p) const {
    if (!p.is_box()) throw InputError("interaction is supported on boxes");
    Box b = p.bounding_box();
    std::int64_t n = (b.size[0] - 1) / 2;
    if (b != Box::cube(dim, -n, 2 * n + 1)) throw InputError("interaction is supported on centered boxes");
    if (n > n_max()) throw InputError("box radius beyond the generated family");
    return x.admissible(p) ? 0.0 : phi[n];
}

std::string InteractionFamily::to_csv() const {
    std::ostringstream os;
    os << "n,phi,strong_partial,weak_partial\n";
    for (std::size_t n = 0; n < phi.size(); ++n)
        os << n << "," << fmt_num(phi[n]) << "," << fmt_num(strong_sum[n]) << "," << fmt_num(weak_sum[n]) << "\n";
    return os.str();
}

InteractionFamily generate_interaction(const FreezingSequence& a, const Subshift& x, std::int64_t n_max) {
    if (n_max < 0) throw InputError("n_max must be non-negative");
    InteractionFamily f;
    f.dim = x.dim();
    double s = 0, w = 0;
    for (std::int64_t n = 0; n <= n_max; ++n) {
        double v = a(n + 1) - a(n);
        f.phi.push_back(v);
        s += std::pow(double(2 * n + 1), f.dim) * std::abs(v);
        w += std::abs(v);
        f.strong_sum.push_back(s);
        f.weak_sum.push_back(w);
    }
    return f;
}

std::string to_string(NogoVerdict v) {
    switch (v) {
        case NogoVerdict::NoGo: return "NoGo";
        case NogoVerdict::CandidateFreezing: return "CandidateFreezing";
        case NogoVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

nlohmann::json NogoReport::to_json() const {
    nlohmann::json j;
    j["verdict"] = to_string(verdict);
    j["reason"] = reason;
    j["trace"] = nlohmann::json::array();
    for (auto [n, s] : trace) j["trace"].push_back({{"N", n}, {"partial_sum", s}});
    return j;
}

NogoReport nogo_classify(const FreezingSequence& a, int d) {
    NogoReport r;
    const auto& cls = a.tail_class;
    if (cls.symbolic) {
        // sum n^{d-1} log^k(n) (loglog n)^m / n^p converges iff p > d (positive log powers never help at p = d).
        if (cls.power > d) {
            r.verdict = NogoVerdict::NoGo;
            r.reason = "class " + cls.label + ": sum of n^(d-1) a_n converges";
        } else {
            r.verdict = NogoVerdict::CandidateFreezing;
            r.reason = "class " + cls.label + ": sum of n^(d-1) a_n diverges";
        }
        return r;
    }
    r.reason = "numeric-only sequence; divergence is not decidable from partial sums";
    double s = 0;
    std::int64_t next = 100;
    for (std::int64_t n = 1; n <= 1000000; ++n) {
        double v;
        try {
            v = a(n);
        } catch (const InputError&) {
            r.reason += "; sequence ends at j = " + std::to_string(n - 1);
            break;
        }
        s += std::pow(double(n), d - 1) * v;
        if (n == next) {
            r.trace.emplace_back(n, s);
            next *= 10;
        }
    }
    return r;
}

double replacement_gain(const TruncatedPotential& pot, const Grid& x, const Grid& W, const Grid& W2,
                        const Point& anchor, const Box& S) {
    if (W.box.size != W2.box.size) throw InputError("replacement blocks differ in shape");
    Box place{x.box.dim, anchor, W.box.size};
    if (!x.box.contains(place)) throw InputError("replacement block lies outside the configuration");
    if (x.crop(place).cells != W.cells) throw InputError("configuration does not contain W at the anchor");
    Grid y = x;
    for_each_point(place, [&](const Point& p) { y.at(p) = W2.at(p - anchor + W2.box.lo); });
    double gain = 0;
    for_each_point(S, [&](const Point& j) { gain += pot.eval_at(y, j) - pot.eval_at(x, j); });
    return gain;
}

}  // namespace thermo
