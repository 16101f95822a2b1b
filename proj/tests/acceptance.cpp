// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "support.hpp"
#include "thermo/complexity.hpp"
#include "thermo/errors.hpp"
#include "thermo/gibbs.hpp"
#include "thermo/pressure.hpp"
#include "thermo/sequence.hpp"
#include "thermo/tiling.hpp"

using namespace thermo;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

int failures = 0;

void report(int id, Outcome o, double secs, double limit) {
    o.require(secs < limit, "runtime " + fmt("%.1f", secs) + " s >= " + fmt("%.0f", limit) + " s");
    std::printf("criterion %2d: %s  [%.1f s] %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

FreezingSequence thm34_for(const Subshift& x, int i_max) {
    return build_thm34_sequence(kappa_source(x, i_max, reference_entropy(entropy_bounds(x, 8))), i_max);
}

const double kGolden = std::log((1 + std::sqrt(5.0)) / 2);

std::vector<PressureCurve> frozen_curves;

// Golden-mean pressure curve shared by criteria 1, 2 and 10.
PressureCurve golden_curve;
double golden_secs = 0;

Outcome criterion1() {
    Outcome o;
    auto t0 = Clock::now();
    auto x = fixtures::golden();
    TruncatedPotential pot(x, thm34_for(*x, 10), 12);
    TransferOptions opt;
    opt.tol = 1e-10;
    TransferModel model(pot, opt);
    std::vector<double> betas = default_beta_grid();
    for (double b : {0.1, 1.5, 2.0, 4.0}) betas.push_back(b);
    std::sort(betas.begin(), betas.end());
    PressureCurve all = evaluate_curve(betas, [&](double b) { return model.at(b); });
    std::map<double, PressurePoint> at;
    for (const auto& p : all.points) at[p.beta] = p;
    auto grid = default_beta_grid();
    for (double b : grid) golden_curve.points.push_back(at.at(b));
    golden_secs = since(t0);

    double p0 = at.at(0.0).estimate;
    o.require(std::abs(p0 - std::log(2.0)) <= 1e-12, "p(0) = " + fmt("%.15g", p0));
    const double a12 = pot.error_bound();
    for (double b : {1.5, 2.0, 4.0}) {
        double e = at.at(b).estimate;
        bool ok = e >= kGolden && e <= kGolden + b * a12 + 1e-9;
        o.require(ok, "beta " + fmt("%g", b) + " estimate " + fmt("%.12f", e));
    }
    double e01 = at.at(0.1).estimate;
    o.note("p(0) " + fmt("%.12f", p0) + ", p(1.5|2|4) " + fmt("%.11f", at.at(2.0).estimate) + ", a_12 " +
           fmt("%.6f", a12) + ", p(0.1) " + fmt("%.6f", e01));
    o.require(e01 >= kGolden + 0.05, "beta 0.1 estimate " + fmt("%.6f", e01) + " < h + 0.05 = " +
                                         fmt("%.6f", kGolden + 0.05));
    return o;
}

Outcome criterion2() {
    Outcome o;
    auto r = detect_freeze(golden_curve);
    auto grid = default_beta_grid();
    auto above = std::upper_bound(grid.begin(), grid.end(), 1.0);
    double step = *above - *(above - 1);
    o.require(r.verdict == FreezeReport::Verdict::FrozenBeyond, "verdict NotDetected");
    o.require(!r.affine_everywhere && r.beta_c_lo > 0 && r.beta_c_hi <= 1 + step,
              "interval [" + fmt("%g", r.beta_c_lo) + ", " + fmt("%g", r.beta_c_hi) + "]");
    o.note("beta_c in [" + fmt("%.6f", r.beta_c_lo) + ", " + fmt("%.6f", r.beta_c_hi) + "], bound 1 + step = " +
           fmt("%.6f", 1 + step));
    if (r.verdict == FreezeReport::Verdict::FrozenBeyond) frozen_curves.push_back(golden_curve);
    return o;
}

Outcome criterion3() {
    Outcome o;
    auto x = fixtures::single_point(true);
    auto a = build_thm51_sequence(0.5);
    TransferModel t(TruncatedPotential(x, a, 12));
    RenewalModel r(*x, a, 1000000);
    auto grid = default_beta_grid();
    auto ct = evaluate_curve(grid, [&](double b) { return t.at(b); });
    auto cr = evaluate_curve(grid, [&](double b) { return r.at(b); });
    int miss = 0;
    double tightest = 1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto &p = ct.points[i], &q = cr.points[i];
        double overlap = std::min(p.upper, q.upper) - std::max(p.lower, q.lower);
        if (overlap < 0) ++miss;
        tightest = std::min(tightest, overlap);
    }
    o.require(miss == 0, std::to_string(miss) + " betas with disjoint brackets");
    o.note(std::to_string(grid.size() - miss) + "/" + std::to_string(grid.size()) +
           " brackets intersect, smallest overlap " + fmt("%.3g", tightest));
    for (const auto* c : {&ct, &cr})
        if (detect_freeze(*c).verdict == FreezeReport::Verdict::FrozenBeyond) frozen_curves.push_back(*c);
    return o;
}

Outcome criterion4() {
    Outcome o;
    auto x = fixtures::single_point(true);
    auto a = sequence_from_expression("1/n^2", 1);
    RenewalModel r(*x, a, 1000000);
    auto c = evaluate_curve(default_beta_grid(), [&](double b) { return r.at(b); });
    auto f = detect_freeze(c);
    o.require(f.verdict == FreezeReport::Verdict::NotDetected, "freeze detected");
    auto n = nogo_classify(a, 1);
    o.require(n.verdict == NogoVerdict::NoGo, "nogo verdict " + to_string(n.verdict));
    o.note("detect_freeze " + std::string(f.verdict == FreezeReport::Verdict::NotDetected ? "NotDetected" : "FrozenBeyond") +
           " (p(8) = " + fmt("%.3g", c.points.back().estimate) + "), nogo " + to_string(n.verdict));
    return o;
}

// Checks the three tiling laws; returns a description of the first violation or "".
std::string tiling_laws(const Subshift& x, const Grid& g, const OdometerOffset& y, const DyadicTiling& t) {
    std::set<Point> covered;
    for (const auto& tile : t.tiles) {
        Box b{g.box.dim, tile.origin, Point::fill(g.box.dim, std::int64_t(1) << tile.level)};
        if (!g.box.contains(b)) return "tile leaves the window";
        for (int i = 0; i < b.dim; ++i)
            if ((tile.origin[i] - y.o[i]) % b.size[i] != 0) return "tile not aligned with the odometer grid";
        bool bad = false;
        for_each_point(b, [&](const Point& p) { bad |= !covered.insert(p).second; });
        if (bad) return "tiles overlap";
        bool adm = x.admissible(g.crop(b));
        if (tile.admissible != adm) return "admissible flag wrong";
        if (!adm && tile.level != 0) return "inadmissible tile above level 0";
        if (adm) {
            // Parent: the aligned box of twice the side containing the tile, grid lines at o mod 2^(level+1).
            Box parent{b.dim, {}, Point::fill(b.dim, 2 * b.size[0])};
            for (int i = 0; i < b.dim; ++i) {
                std::int64_t side = parent.size[i], r = ((tile.origin[i] - y.o[i]) % side + side) % side;
                parent.lo[i] = tile.origin[i] - r;
            }
            if (!g.box.contains(parent)) return "maximality witness leaves the window";
            if (x.admissible(g.crop(parent))) return "admissible tile is not maximal";
        }
    }
    std::size_t margin = t.margin.size();
    if (covered.size() + margin != static_cast<std::size_t>(g.box.volume())) return "tiles and margin do not cover";
    for (const auto& p : t.margin)
        if (covered.count(p)) return "margin cell covered";
    return "";
}

Outcome criterion5() {
    Outcome o;
    CounterRng rng(0x5eed, 5);
    auto sp1 = fixtures::single_point();
    auto sp2 = fixtures::single_point(false, 2);
    auto gm = fixtures::golden();
    int checked = 0, tiles = 0;
    std::string first;
    std::vector<std::tuple<const Subshift*, Grid, OdometerOffset>> cases;
    for (int c = 0; c < 200; ++c) {
        int kind = c % 3;
        const Subshift* x = kind == 0 ? sp1.get() : kind == 1 ? gm.get() : sp2.get();
        int dim = x->dim();
        std::int64_t side = dim == 1 ? 4 + rng.below(125) : 4 + rng.below(29);
        double density = 0.002 + 0.1 * rng.uniform() / dim;
        Grid g = gen::grid(rng, Box::cube(dim, -static_cast<std::int64_t>(rng.below(64)), side), 2, density);
        Point off;
        for (int i = 0; i < dim; ++i) off[i] = static_cast<std::int64_t>(rng.below(1 << 12));
        OdometerOffset y(dim, off, 12);
        auto t = tile_decomposition(*x, g, y);
        std::string err = tiling_laws(*x, g, y, t);
        if (!err.empty() && first.empty()) first = "case " + std::to_string(c) + ": " + err;
        ++checked;
        tiles += static_cast<int>(t.tiles.size());
        if (cases.size() < 50) cases.emplace_back(x, g, y);
    }
    o.require(first.empty(), first);
    int equivariant = 0;
    for (auto& [x, g, y] : cases) {
        Point v;
        for (int i = 0; i < x->dim(); ++i) v[i] = static_cast<std::int64_t>(rng.below(200)) - 100;
        auto a = tile_decomposition(*x, g, y);
        auto b = tile_decomposition(*x, g.translated(v), y.shifted(v));
        bool same = a.tiles.size() == b.tiles.size() && a.margin.size() == b.margin.size();
        for (std::size_t i = 0; same && i < a.tiles.size(); ++i)
            same = b.tiles[i].origin == a.tiles[i].origin + v && b.tiles[i].level == a.tiles[i].level &&
                   b.tiles[i].admissible == a.tiles[i].admissible;
        equivariant += same;
    }
    o.require(equivariant == 50, std::to_string(50 - equivariant) + " shifted pairs not equivariant");
    o.note(std::to_string(checked) + " tilings (" + std::to_string(tiles) + " tiles) satisfy cover/admissible/maximal, " +
           std::to_string(equivariant) + "/50 shifted pairs equivariant");
    return o;
}

Outcome criterion6() {
    Outcome o;
    auto tm = fixtures::thue_morse();
    auto bound = substitution_complexity_bound(*tm);
    o.require(bound.Q == 1 && bound.C == 8, "bound Q " + fmt("%g", bound.Q) + " C " + fmt("%g", bound.C));
    int worst_n = 0;
    double worst = 0;
    for (int n = 1; n <= 64; ++n) {
        double ratio = static_cast<double>(count_blocks(*tm, n)) / (8.0 * n);
        if (ratio > worst) worst = ratio, worst_n = n;
        o.require(count_blocks(*tm, n) <= 8 * n, "count(" + std::to_string(n) + ") > 8n");
    }
    auto a = build_cor53_sequence();
    auto v = nogo_classify(a, 1);
    o.require(a.tail_class.label == "O(log^2 j/j)", "class tag " + a.tail_class.label);
    o.require(v.verdict == NogoVerdict::CandidateFreezing, "nogo verdict " + to_string(v.verdict));
    o.note("max count(n)/(8n) = " + fmt("%.3f", worst) + " at n = " + std::to_string(worst_n) + ", class " +
           a.tail_class.label + " -> " + to_string(v.verdict));
    return o;
}

Outcome criterion7() {
    Outcome o;
    auto x = fixtures::golden();
    const std::int64_t N = 10000;
    auto phi = generate_interaction(thm34_for(*x, 10), *x, N);
    double B = phi.weak_sum[N], Bhalf = phi.weak_sum[N / 2], S = phi.strong_sum[N];
    double mean_inc = (B - Bhalf) / double(N / 2);
    o.require(mean_inc < 1e-6, "mean B increment " + fmt("%.3g", mean_inc));
    o.require(S > 10 * B, "S sum " + fmt("%.4g", S) + " <= 10 x B sum " + fmt("%.4g", B));
    o.note("B(1e4) = " + fmt("%.6f", B) + ", mean increment over (5e3, 1e4] = " + fmt("%.3g", mean_inc) +
           ", S(1e4) = " + fmt("%.2f", S) + " = " + fmt("%.1f", S / B) + " x B");
    return o;
}

Outcome criterion8() {
    Outcome o;
    double worst_dlr = 0, worst_margin = 1e300;
    int pairs = 0;
    for (auto x : {fixtures::golden(), fixtures::single_point()}) {
        auto a = thm34_for(*x, 10);
        CounterRng rng(0x88, x->spec().kind.index());
        for (std::int64_t len = 2; len <= 6; ++len)
            for (std::int64_t n_max : {1, 2}) {
                FiniteSpecification fs;
                fs.x = x;
                fs.phi = generate_interaction(a, *x, n_max);
                fs.lambda = Box::cube(1, 0, len);
                fs.beta = 1.5;
                fs.boundary = Grid(fs.collar_box());
                for (auto& s : fs.boundary.cells) s = rng.uniform() < 0.3;
                worst_margin = std::min(worst_margin, rho_bound_margin(conditional_weights(fs),
                                                                       full_support_rho(fs.phi, 2, fs.beta)));
                for (std::int64_t sl = 1; sl < len; ++sl)
                    for (std::int64_t at = 0; at + sl <= len; ++at) {
                        worst_dlr = std::max(worst_dlr, dlr_discrepancy(fs, Box::cube(1, at, sl)));
                        ++pairs;
                    }
            }
    }
    o.require(worst_dlr <= 1e-12, "DLR discrepancy " + fmt("%.3g", worst_dlr));
    o.require(worst_margin >= 1, "weight below rho^|Lambda| (margin " + fmt("%.3g", worst_margin) + ")");

    auto hs = fixtures::hard_squares();
    TruncatedPotential pot(hs, thm34_for(*hs, 3), 3);
    auto hot = metropolis_run(pot, 0, 32, 10000000, 1);
    auto cold = metropolis_run(pot, 6, 32, 10000000, 1);
    o.require(cold.mean_inadmissible_mass * 10 <= hot.mean_inadmissible_mass,
              "mass ratio " + fmt("%.3g", cold.mean_inadmissible_mass / hot.mean_inadmissible_mass));
    o.note(std::to_string(pairs) + " nested pairs, max DLR discrepancy " + fmt("%.2g", worst_dlr) +
           ", min weight / rho^|Lambda| " + fmt("%.3g", worst_margin) + ", inadmissible mass beta 0: " +
           fmt("%.4f", hot.mean_inadmissible_mass) + ", beta 6: " + fmt("%.2g", cold.mean_inadmissible_mass));
    return o;
}

Outcome criterion9() {
    Outcome o;
    auto hs = fixtures::hard_squares();
    TruncatedPotential pot(hs, thm34_for(*hs, 3), 2);
    TorusModel t4(pot, 4), t5(pot, 5);
    std::string diffs;
    for (double b : {0.5, 1.0, 2.0}) {
        double d = std::abs(t4.log_z_per_site(b) - t5.log_z_per_site(b));
        o.require(d < 0.1, "beta " + fmt("%g", b) + " difference " + fmt("%.4f", d));
        diffs += (diffs.empty() ? "" : ", ") + fmt("%.4f", d);
    }
    for (const TorusModel* t : {&t4, &t5}) {
        double p0 = t->log_z_per_site(0);
        o.require(std::abs(p0 - std::log(2.0)) <= 1e-15, "beta 0 gives " + fmt("%.17g", p0));
    }
    o.note("|p4 - p5| at beta 0.5, 1, 2: " + diffs + "; p(0) = log 2 on both tori");
    return o;
}

Outcome criterion10() {
    Outcome o;
    o.require(!frozen_curves.empty(), "no frozen curve computed");
    std::string parts;
    for (const auto& c : frozen_curves) {
        auto f = fit_slant(c);
        o.require(f.monotone, "residuals increase beyond slack");
        o.require(std::abs(f.s_hat) <= f.s_slack, "s_hat " + fmt("%.3g", f.s_hat) + " > slack " + fmt("%.3g", f.s_slack));
        parts += (parts.empty() ? "" : ", ") + c.points.front().method + " s_hat " + fmt("%.2g", f.s_hat) + " (slack " +
                 fmt("%.2g", f.s_slack) + ")";
    }
    o.note(std::to_string(frozen_curves.size()) + " frozen curves: " + parts);
    return o;
}

}  // namespace

int main() {
    struct Item {
        int id;
        std::function<Outcome()> run;
        double limit;
    };
    std::vector<Item> items = {{1, criterion1, 60}, {2, criterion2, 60},   {3, criterion3, 120}, {4, criterion4, 60},
                               {5, criterion5, 30}, {6, criterion6, 30},   {7, criterion7, 10},  {8, criterion8, 300},
                               {9, criterion9, 600}, {10, criterion10, 10}};
    for (auto& it : items) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = it.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = since(t0);
        if (it.id == 2) secs += golden_secs;
        report(it.id, o, secs, it.limit);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failures, items.size());
    return failures ? 1 : 0;
}
