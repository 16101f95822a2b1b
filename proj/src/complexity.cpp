#include "thermo/complexity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <sstream>

#include "thermo/errors.hpp"

namespace thermo {

double log_big(const BigInt& x) {
    if (x <= 0) throw InputError("logarithm of a non-positive count");
    const auto bits = boost::multiprecision::msb(x);
    if (bits < 1000) return std::log(x.convert_to<double>());
    const auto shift = bits - 60;
    BigInt top = x >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

std::string to_string(CountMethod m) {
    switch (m) {
        case CountMethod::Brute: return "brute";
        case CountMethod::Transfer1d: return "transfer-1d";
        case CountMethod::RowTransfer2d: return "row-transfer-2d";
        case CountMethod::Substitution: return "substitution";
    }
    return "?";
}

const BigInt& ComplexityTable::count(std::int64_t n) const {
    auto it = entries.find(n);
    if (it == entries.end()) throw InputError("count for n = " + std::to_string(n) + " not tabulated");
    return it->second.count;
}

std::string ComplexityTable::to_csv() const {
    std::ostringstream os;
    os << "n,count,method\n";
    for (const auto& [n, e] : entries) os << n << "," << e.count.str() << "," << to_string(e.method) << "\n";
    return os.str();
}

namespace {

BigInt count_block_graph(const BlockGraph& g, std::int64_t n) {
    const int M = g.memory, k = g.k;
    if (n <= M) {
        BigInt c = 0;
        for (auto ok : g.admissible_short[n]) c += ok;
        return c;
    }
    const std::int64_t nv = g.pow_k(M);
    std::vector<BigInt> v(nv), w(nv);
    for (std::int64_t i = 0; i < nv; ++i) v[i] = g.vertex[i] ? 1 : 0;
    for (std::int64_t step = 0; step < n - M; ++step) {
        for (auto& x : w) x = 0;
        for (std::int64_t e = 0; e < nv * k; ++e)
            if (g.edge[e]) w[e / k] += v[e % nv];
        std::swap(v, w);
    }
    BigInt total = 0;
    for (const auto& x : v) total += x;
    return total;
}

BigInt count_substitution(const Subshift& x, std::int64_t n) {
    Box box = Box::cube(x.dim(), 0, n);
    int lvl = x.substitution_level(box.size);
    std::set<std::vector<Symbol>> seen;
    for (const auto& img : x.block_images(lvl)) {
        Box anchors = img.box;
        for (int i = 0; i < x.dim(); ++i) anchors.size[i] -= n - 1;
        for_each_point(anchors, [&](const Point& a) { seen.insert(img.crop(box.translated(a)).cells); });
    }
    return BigInt(seen.size());
}

// Row-transfer count of locally admissible n x n blocks for 2D SFTs whose forbidden
// patterns span at most two rows.
BigInt count_row_transfer(const Subshift& x, std::int64_t n, const CountOptions& opt) {
    const auto& forb = x.templates()->templates;
    const int k = static_cast<int>(x.alphabet_size());
    double rows_total = std::pow(double(k), double(n));
    if (n > opt.row_width_cap || rows_total > std::ldexp(1.0, opt.row_width_cap))
        throw ResourceError("row width exceeds row-transfer cap", opt.row_width_cap);
    auto fits_clean = [&](const Grid& g) {
        for (const auto& f : forb) {
            Box fb = f.bounding_box();
            Box anchors = g.box;
            for (int i = 0; i < 2; ++i) anchors.size[i] -= fb.size[i] - 1;
            if (anchors.empty()) continue;
            for (std::int64_t a = 0; a < anchors.volume(); ++a)
                if (template_matches(f, g, anchors.point(a))) return false;
        }
        return true;
    };
    const std::int64_t nrows = static_cast<std::int64_t>(rows_total);
    std::vector<std::vector<Symbol>> rows;
    Grid one(Box{2, Point{}, Point::of({1, n})});
    for (std::int64_t code = 0; code < nrows; ++code) {
        std::int64_t c = code;
        for (std::int64_t i = n - 1; i >= 0; --i) {
            one.cells[i] = static_cast<Symbol>(c % k);
            c /= k;
        }
        if (fits_clean(one)) rows.push_back(one.cells);
    }
    if (n == 1) return BigInt(rows.size());
    Grid two(Box{2, Point{}, Point::of({2, n})});
    std::vector<std::vector<std::int32_t>> succ(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < rows.size(); ++b) {
            std::copy(rows[a].begin(), rows[a].end(), two.cells.begin());
            std::copy(rows[b].begin(), rows[b].end(), two.cells.begin() + n);
            if (fits_clean(two)) succ[a].push_back(static_cast<std::int32_t>(b));
        }
    std::vector<BigInt> v(rows.size(), 1), w(rows.size());
    for (std::int64_t step = 1; step < n; ++step) {
        for (auto& z : w) z = 0;
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (auto b : succ[a]) w[b] += v[a];
        std::swap(v, w);
    }
    BigInt total = 0;
    for (const auto& z : v) total += z;
    return total;
}

}  // namespace

ComplexityEntry count_entry(const Subshift& x, std::int64_t n, const CountOptions& opt) {
    if (n < 1) throw InputError("block size must be >= 1");
    ComplexityEntry e;
    e.n = n;
    const auto& spec = x.spec();
    if (const BlockGraph* g = x.block_graph()) {
        e.count = count_block_graph(*g, n);
        e.method = CountMethod::Transfer1d;
        return e;
    }
    if (std::holds_alternative<SinglePointKind>(spec.kind)) {
        e.count = 1;
        e.method = CountMethod::Brute;
        return e;
    }
    if (const auto* full = std::get_if<FullShiftKind>(&spec.kind)) {
        BigInt vol = 1;
        for (int i = 0; i < x.dim(); ++i) vol *= n;
        e.count = boost::multiprecision::pow(BigInt(full->sub_alphabet.size()), static_cast<unsigned>(vol));
        e.method = CountMethod::Brute;
        return e;
    }
    if (x.is_substitution()) {
        e.count = count_substitution(x, n);
        e.method = CountMethod::Substitution;
        return e;
    }
    // d >= 2 SFT
    bool two_row = x.dim() == 2;
    if (two_row)
        for (const auto& f : x.templates()->templates)
            if (f.bounding_box().size[0] > 2) two_row = false;
    e.exact_language = x.templates()->exact;
    if (two_row) {
        e.count = count_row_transfer(x, n, opt);
        e.method = CountMethod::RowTransfer2d;
        return e;
    }
    double cand = std::pow(double(x.alphabet_size()), std::pow(double(n), x.dim()));
    if (cand > opt.brute_guard) throw ResourceError("brute-force block count exceeds guard", opt.brute_guard);
    EnumerationGuard guard;
    guard.max_candidates = opt.brute_guard;
    guard.max_patterns = opt.brute_guard;
    e.count = BigInt(enumerate_language(x, BoxWindow::erg(x.dim(), n), guard).size());
    e.exact_language = true;
    e.method = CountMethod::Brute;
    return e;
}

BigInt count_blocks(const Subshift& x, std::int64_t n, const CountOptions& opt) {
    return count_entry(x, n, opt).count;
}

ComplexityTable complexity_table(const Subshift& x, const std::vector<std::int64_t>& ns, const CountOptions& opt) {
    ComplexityTable t;
    for (auto n : ns) t.entries[n] = count_entry(x, n, opt);
    return t;
}

double perron_entropy_1d(const BlockGraph& g) {
    const std::int64_t nv = g.pow_k(g.memory);
    std::vector<std::int64_t> ids(nv, -1);
    std::int64_t m = 0;
    for (std::int64_t v = 0; v < nv; ++v)
        if (g.vertex[v]) ids[v] = m++;
    // Vertices reachable only forward (one-sided) still contribute; include every vertex with an edge.
    for (std::int64_t e = 0; e < nv * g.k; ++e)
        if (g.edge[e] && ids[e % nv] < 0) ids[e % nv] = m++;
    if (m > 2048) throw ResourceError("block graph too large for dense eigenvalues", 2048);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    for (std::int64_t e = 0; e < nv * g.k; ++e)
        if (g.edge[e]) A(ids[e / g.k], ids[e % nv]) += 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    double rho = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) rho = std::max(rho, std::abs(es.eigenvalues()[i]));
    return std::log(rho);
}

EntropyEstimate entropy_bounds(const Subshift& x, std::int64_t n_max, const CountOptions& opt) {
    if (n_max < 1) throw InputError("n_max must be >= 1");
    EntropyEstimate est;
    est.upper = std::numeric_limits<double>::infinity();
    for (std::int64_t n = 1; n <= n_max; ++n) {
        double vol = std::pow(double(n), x.dim());
        est.upper = std::min(est.upper, log_big(count_blocks(x, n, opt)) / vol);
    }
    est.lower = 0;
    est.provenance = "none";
    const auto& spec = x.spec();
    if (const BlockGraph* g = x.block_graph()) {
        est.exact = perron_entropy_1d(*g);
        est.provenance = "perron-1d";
    } else if (x.is_substitution()) {
        est.exact = 0.0;
        est.provenance = "zero-substitution";
    } else if (std::holds_alternative<SinglePointKind>(spec.kind)) {
        est.exact = 0.0;
        est.provenance = "closed-form";
    } else if (const auto* full = std::get_if<FullShiftKind>(&spec.kind)) {
        est.exact = std::log(double(full->sub_alphabet.size()));
        est.provenance = "closed-form";
    }
    if (est.exact) {
        est.lower = *est.exact;
        est.upper = std::max(est.upper, *est.exact);
    }
    return est;
}

std::string HRef::describe() const {
    switch (source) {
        case Source::Exact: return "exact";
        case Source::UpperBound:
            return "conditional: entropy upper bound used; sequence values are at least the exact-entropy values, "
                   "so the freezing inequalities still hold";
        case Source::User: return "user-supplied";
    }
    return "?";
}

HRef reference_entropy(const EntropyEstimate& e) {
    HRef h;
    if (e.exact) {
        h.value = *e.exact;
        h.source = HRef::Source::Exact;
    } else {
        h.value = e.upper;
        h.source = HRef::Source::UpperBound;
    }
    return h;
}

KappaSequence kappa_sequence(const Subshift& x, int i_max, const HRef& h_ref, const CountOptions& opt) {
    if (i_max < 0) throw InputError("i_max must be non-negative");
    KappaSequence k;
    k.h_ref = h_ref;
    k.dim = x.dim();
    for (int i = 0; i <= i_max; ++i) {
        std::int64_t side = std::int64_t(1) << i;
        BigInt c = count_blocks(x, side, opt);
        double vol = std::pow(2.0, double(i) * x.dim());
        double kap = log_big(c) / vol - h_ref.value;
        if (kap < -1e-12)
            throw InputError("inconsistent h_ref: kappa_" + std::to_string(i) + " = " + std::to_string(kap) +
                             " < 0, so h_ref exceeds an entropy upper bound");
        k.kappa.push_back(std::max(kap, 0.0));
        k.counts.push_back(c);
    }
    return k;
}

ComplexityBound substitution_complexity_bound(const Subshift& x) {
    const auto* sub = std::get_if<SubstitutionKind>(&x.spec().kind);
    if (!sub) throw InputError("complexity bound needs a substitution spec");
    double prod = 1, mmin = 1e300;
    for (auto m : sub->box_dims) {
        prod *= double(m);
        mmin = std::min(mmin, double(m));
    }
    ComplexityBound b;
    b.Q = std::log(prod) / std::log(mmin);
    b.C = std::pow(double(x.alphabet_size()), std::pow(2.0, x.dim())) * std::pow(mmin, b.Q);
    return b;
}

}  // namespace thermo
