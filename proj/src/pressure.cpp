#include "thermo/pressure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "thermo/errors.hpp"
#include "thermo/format.hpp"

namespace thermo {

std::string PressureCurve::to_csv() const {
    std::ostringstream os;
    os << "beta,estimate,lower,upper,method,R\n";
    for (const auto& p : points)
        os << fmt_num(p.beta) << "," << fmt_num(p.estimate) << "," << fmt_num(p.lower) << "," << fmt_num(p.upper)
           << "," << p.method << "," << p.R << "\n";
    return os.str();
}

PressureCurve PressureCurve::from_csv(const std::string& text) {
    PressureCurve c;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("beta,estimate,lower,upper", 0) != 0)
        throw InputError("curve CSV must start with the header beta,estimate,lower,upper,method,R");
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() < 4) throw InputError("curve CSV line " + std::to_string(lineno) + " has too few fields");
        PressurePoint p;
        try {
            p.beta = std::stod(f[0]);
            p.estimate = std::stod(f[1]);
            p.lower = std::stod(f[2]);
            p.upper = std::stod(f[3]);
            if (f.size() > 4) p.method = f[4];
            if (f.size() > 5) p.R = std::stoll(f[5]);
        } catch (const std::exception&) {
            throw InputError("curve CSV line " + std::to_string(lineno) + " is not numeric");
        }
        if (!(p.lower <= p.estimate && p.estimate <= p.upper))
            throw InputError("curve CSV line " + std::to_string(lineno) + " violates lower <= estimate <= upper");
        c.points.push_back(p);
    }
    std::sort(c.points.begin(), c.points.end(), [](const auto& a, const auto& b) { return a.beta < b.beta; });
    return c;
}

std::vector<double> default_beta_grid(double lo, double hi, int count) {
    if (!(lo > 0 && hi > lo) || count < 2) throw InputError("beta grid needs 0 < lo < hi and at least 2 points");
    std::vector<double> g{0.0};
    for (int i = 0; i < count; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
    g.back() = hi;
    return g;
}

// ---------------------------------------------------------------- transfer operator

namespace {

// Iterative Tarjan; returns components of size > 1 or with a self-loop.
template <class Succ>
std::vector<std::vector<std::int32_t>> strong_components(std::int64_t n, Succ succ) {
    std::vector<std::int32_t> index(n, -1), low(n, 0);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<std::int32_t> stack;
    std::vector<std::vector<std::int32_t>> out;
    std::int32_t counter = 0;
    struct Frame {
        std::int32_t v;
        std::size_t next;
    };
    std::vector<Frame> call;
    for (std::int32_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& s = succ(f.v);
            if (f.next < s.size()) {
                std::int32_t w = s[f.next++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            std::int32_t v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::int32_t> comp;
                std::int32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                bool nontrivial = comp.size() > 1;
                if (!nontrivial)
                    for (auto t : succ(v))
                        if (t == v) nontrivial = true;
                if (nontrivial) {
                    std::sort(comp.begin(), comp.end());
                    out.push_back(std::move(comp));
                }
            }
        }
    }
    return out;
}

}  // namespace

void TransferModel::add_state_edges(std::int64_t s, std::vector<Edge> out) {
    if (static_cast<std::int64_t>(start_.size()) != s + 1) throw std::logic_error("states added out of order");
    for (auto& e : out) edges_.push_back(e);
    start_.push_back(static_cast<std::int64_t>(edges_.size()));
}

void TransferModel::finish() {
    std::vector<std::vector<std::int32_t>> succ(n_);
    for (std::int64_t s = 0; s < n_; ++s)
        for (std::int64_t e = start_[s]; e < start_[s + 1]; ++e) succ[s].push_back(edges_[e].to);
    components_ = strong_components(n_, [&](std::int32_t v) -> const std::vector<std::int32_t>& { return succ[v]; });
    comp_of_.assign(n_, -1);
    for (std::size_t c = 0; c < components_.size(); ++c)
        for (auto v : components_[c]) comp_of_[v] = static_cast<std::int32_t>(c);
    if (components_.empty()) throw InputError("transfer graph has no cycle");
}

TransferModel::TransferModel(const TruncatedPotential& pot, const TransferOptions& opt) : opt_(opt) {
    const Subshift& x = pot.subshift();
    if (x.dim() != 1) throw InputError("transfer_pressure_1d needs a 1D subshift");
    if (!(opt.tol > 0)) throw InputError("tolerance must be positive");
    R_ = pot.radius();
    a_R_ = pot.error_bound();
    const auto& a = pot.sequence();
    auto w = [&](std::int64_t j) { return j <= R_ ? -a(j) : 0.0; };
    const int k = static_cast<int>(x.alphabet_size());
    const BlockGraph* g = x.block_graph();
    start_.push_back(0);
    if (g && g->short_complete && !opt.force_generic) {
        // States: last M symbols and the distance to the last defect, capped at C. A defect is an
        // (M+1)-block outside the language; the potential summed over the centers between two
        // consecutive defects depends only on their gap.
        compressed_ = true;
        const int M = g->memory;
        const std::int64_t nv = g->pow_k(M);
        const std::int64_t C = 2 * R_ + 2;
        n_ = nv * (C + 1);
        if (double(n_) > opt.state_guard) throw ResourceError("transfer state count exceeds guard", opt.state_guard);
        std::vector<double> G(C + 2, 0.0);
        const std::int64_t m = M / 2;
        for (std::int64_t gap = 1; gap <= C + 1; ++gap) {
            double sum = 0;
            for (std::int64_t s = 0; s < gap; ++s) {
                std::int64_t j = x.one_sided() ? std::min(M + 1 + s, R_ + 1)
                                               : std::min({M - m + s, gap + m - s, R_ + 1});
                sum += w(j);
            }
            G[gap] = sum;
        }
        for (std::int64_t u = 0; u < nv; ++u)
            for (std::int64_t dd = 0; dd <= C; ++dd) {
                std::vector<Edge> out;
                for (int sym = 0; sym < k; ++sym) {
                    std::int64_t code = u * k + sym, v = code % nv;
                    if (!g->edge[code]) {
                        std::int64_t gap = dd < C ? dd + 1 : C + 1;
                        out.push_back({static_cast<std::int32_t>(v * (C + 1)), G[gap]});
                    } else {
                        out.push_back({static_cast<std::int32_t>(v * (C + 1) + std::min(dd + 1, C)), 0.0});
                    }
                }
                add_state_edges(u * (C + 1) + dd, std::move(out));
            }
    } else {
        // States: words of length L-1; the edge word of length L is the window of one center.
        const std::int64_t L = x.one_sided() ? std::max<std::int64_t>(R_, 1) : 2 * R_ + 1;
        double states = std::pow(double(k), double(L - 1));
        if (states > opt.state_guard) throw ResourceError("transfer state count exceeds guard", opt.state_guard);
        n_ = static_cast<std::int64_t>(states);
        const Box wb = x.one_sided() ? Box::cube(1, 0, L) : Box::cube(1, -R_, L);
        Grid word(wb);
        for (std::int64_t s = 0; s < n_; ++s) {
            std::vector<Edge> out;
            for (int sym = 0; sym < k; ++sym) {
                std::int64_t code = s * k + sym;
                std::int64_t c = code;
                for (std::int64_t i = L - 1; i >= 0; --i) {
                    word.cells[i] = static_cast<Symbol>(c % k);
                    c /= k;
                }
                double e = (x.one_sided() && R_ == 0) ? 0.0 : pot.eval_at(word, Point{});
                out.push_back({static_cast<std::int32_t>(code % n_), e});
            }
            add_state_edges(s, std::move(out));
        }
    }
    finish();
}

PressurePoint TransferModel::at(double beta) const {
    if (!(beta >= 0)) throw InputError("beta must be non-negative");
    double best_lo = 0, best_hi = 0;
    for (const auto& comp : components_) {
        const std::int64_t m = static_cast<std::int64_t>(comp.size());
        auto pos = [&](std::int32_t v) {
            return static_cast<std::int32_t>(std::lower_bound(comp.begin(), comp.end(), v) - comp.begin());
        };
        std::vector<std::int64_t> st{0};
        std::vector<std::int32_t> to;
        std::vector<double> wt;
        const std::int32_t cid = comp_of_[comp[0]];
        for (auto v : comp) {
            for (std::int64_t e = start_[v]; e < start_[v + 1]; ++e) {
                if (comp_of_[edges_[e].to] != cid) continue;
                to.push_back(pos(edges_[e].to));
                wt.push_back(std::max(std::exp(beta * edges_[e].energy), 1e-300));
            }
            st.push_back(static_cast<std::int64_t>(to.size()));
        }
        Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
        if (m <= 600) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
            for (std::int64_t i = 0; i < m; ++i)
                for (std::int64_t e = st[i]; e < st[i + 1]; ++e) A(i, to[e]) += wt[e];
            Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
            int arg = 0;
            for (int i = 1; i < m; ++i)
                if (es.eigenvalues()[i].real() > es.eigenvalues()[arg].real()) arg = i;
            Eigen::VectorXd cand = es.eigenvectors().col(arg).real().cwiseAbs();
            double mx = cand.maxCoeff();
            if (mx > 0 && std::isfinite(mx)) {
                for (std::int64_t i = 0; i < m; ++i) v[i] = std::max(cand[i] / mx, 1e-200);
            }
        }
        double mean_row = 0;
        for (double x : wt) mean_row += x;
        mean_row /= double(m);
        const double alpha = 0.1 * mean_row;
        Eigen::VectorXd y(m);
        double lo = 0, hi = std::numeric_limits<double>::infinity();
        std::int64_t it = 0;
        for (;; ++it) {
            for (std::int64_t i = 0; i < m; ++i) {
                double s = 0;
                for (std::int64_t e = st[i]; e < st[i + 1]; ++e) s += wt[e] * v[to[e]];
                y[i] = s;
            }
            double l = std::numeric_limits<double>::infinity(), h = 0;
            for (std::int64_t i = 0; i < m; ++i) {
                double r = y[i] / v[i];
                l = std::min(l, r);
                h = std::max(h, r);
            }
            lo = std::max(lo, l);
            hi = std::min(hi, h);
            if (std::log(hi) - std::log(lo) <= opt_.tol) break;
            if (it >= opt_.max_iter)
                throw ConvergenceError("power iteration did not converge", std::log(lo), std::log(hi));
            v = y + alpha * v;
            v /= v.maxCoeff();
            for (std::int64_t i = 0; i < m; ++i) v[i] = std::max(v[i], 1e-300);
        }
        best_lo = std::max(best_lo, lo);
        best_hi = std::max(best_hi, hi);
    }
    PressurePoint p;
    p.beta = beta;
    p.method = "transfer-1d";
    p.R = R_;
    p.estimate = 0.5 * (std::log(best_lo) + std::log(best_hi));
    p.lower = p.estimate - beta * a_R_ - opt_.tol;
    p.upper = p.estimate + opt_.tol;
    if (compressed_) p.note = "defect-gap automaton";
    return p;
}

PressurePoint transfer_pressure_1d(const TruncatedPotential& pot, double beta, const TransferOptions& opt) {
    return TransferModel(pot, opt).at(beta);
}

// ---------------------------------------------------------------- renewal

RenewalModel::RenewalModel(const Subshift& x, const FreezingSequence& a, std::int64_t n_max) : a_(&a) {
    const auto* sp = std::get_if<SinglePointKind>(&x.spec().kind);
    if (!sp || x.dim() != 1 || !x.one_sided())
        throw InputError("renewal pressure needs a one-sided 1D single-point target");
    if (n_max < 1) throw InputError("N_max must be >= 1");
    if (x.alphabet_size() < 2) throw InputError("renewal pressure needs at least two symbols");
    mult_ = double(x.alphabet_size() - 1);
    N_ = n_max;
    S_.resize(N_ + 2);
    S_[0] = 0;
    for (std::int64_t n = 1; n <= N_ + 1; ++n) S_[n] = S_[n - 1] - a(n);
    if (a.power_law && a.power_law->power == 1.0 && a.power_law->log_pow == 0 && a.power_law->peak <= N_)
        harmonic_coef_ = a.power_law->coef;
}

RenewalModel::Bounds RenewalModel::F(double beta, double P, double* deriv) const {
    double sum = 0, d = 0;
    std::int64_t n = 1;
    const double geo = P > 0 ? 1.0 / std::expm1(P) : std::numeric_limits<double>::infinity();
    std::int64_t last = N_;
    for (; n <= N_; ++n) {
        double t = mult_ * std::exp(beta * S_[n] - double(n) * P);
        sum += t;
        d += double(n) * t;
        if ((n & 63) == 0 && t * geo < 1e-18 * sum) {
            last = n;
            break;
        }
    }
    if (deriv) *deriv = d;
    const double head = mult_ * std::exp(beta * S_[last] - double(last) * P);
    Bounds b;
    // Lower tail: a_j <= a_{last+1} for j > last.
    double rate = beta * (*a_)(last + 1) + P;
    b.lo = sum + (rate > 0 ? head / std::expm1(rate) : std::numeric_limits<double>::infinity());
    // Upper tail: S_n <= S_last, and for a_j = c/j also S_n <= S_last - c log((n+1)/(last+1)).
    double up = head * geo;
    double q = harmonic_coef_ * beta;
    if (q > 1) up = std::min(up, head * std::exp(-P) * double(last + 1) / (q - 1));
    b.hi = sum + up;
    return b;
}

namespace {

// Bracket [lo, hi] of the root of a decreasing f with f(lo) > 1 >= f(hi).
template <class Fn>
std::pair<double, double> decreasing_root(Fn f, double lo, double hi) {
    double x = lo;
    for (int it = 0; it < 400 && hi - lo > 1e-15 * std::max(1e-3, hi); ++it) {
        double d = 0;
        double v = f(x, &d);
        (v > 1 ? lo : hi) = x;
        double nx = d > 0 ? x + (v - 1) / d : std::numeric_limits<double>::quiet_NaN();
        if (!(nx > lo && nx < hi)) {
            nx = 0.5 * (lo + hi);
        } else if (std::abs(nx - x) < 1e-3 * (hi - lo)) {
            // Newton has settled; probe just past it to close the bracket from the other side.
            double step = std::max(std::abs(nx - x), 1e-16 * std::max(1e-3, nx));
            double probe = v > 1 ? std::min(hi, nx + 4 * step) : std::max(lo, nx - 4 * step);
            double pv = f(probe, nullptr);
            (pv > 1 ? lo : hi) = probe;
            if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        }
        x = nx;
    }
    return {lo, hi};
}

}  // namespace

PressurePoint RenewalModel::at(double beta) const {
    if (!(beta >= 0)) throw InputError("beta must be non-negative");
    const double Pmax = std::log(mult_ + 1) + 1;
    PressurePoint p;
    p.beta = beta;
    p.method = "renewal";
    p.R = N_;
    auto lower_fn = [&](double P, double* d) { return F(beta, P, d).lo; };
    auto upper_fn = [&](double P, double* d) { return F(beta, P, d).hi; };
    Bounds at0 = F(beta, 0.0, nullptr);
    if (at0.hi < 1) {
        p.note = "frozen at this beta: renewal mass below 1 at P = 0";
        return p;
    }
    p.lower = at0.lo > 1 ? decreasing_root(lower_fn, 0.0, Pmax).first : 0.0;
    p.upper = decreasing_root(upper_fn, 0.0, Pmax).second;
    p.estimate = 0.5 * (p.lower + p.upper);
    return p;
}

PressurePoint renewal_pressure(const Subshift& x, const FreezingSequence& a, double beta, std::int64_t n_max) {
    return RenewalModel(x, a, n_max).at(beta);
}

// ---------------------------------------------------------------- 2D torus

TorusModel::TorusModel(const TruncatedPotential& pot, int n, double guard) : n_(n) {
    const Subshift& x = pot.subshift();
    if (x.dim() != 2) throw InputError("torus pressure needs a 2D subshift");
    if (n < 1) throw InputError("torus side must be >= 1");
    const std::int64_t R = pot.radius();
    if (R > 7) throw InputError("torus pressure supports R <= 7");
    const int k = static_cast<int>(x.alphabet_size());
    if (k != 2 || n * n > 62) throw InputError("torus pressure enumerates binary alphabets with n*n <= 62");
    if (std::ldexp(1.0, n * n) > guard) throw ResourceError("torus enumeration exceeds guard", guard);
    for (std::int64_t j = 0; j <= R; ++j) a_.push_back(pot.sequence()(j));
    const int cells = n * n;
    auto cell = [&](std::int64_t r, std::int64_t c) {
        r = ((r % n) + n) % n;
        c = ((c % n) + n) % n;
        return static_cast<int>(r * n + c);
    };
    // Per center: template placements ordered by the smallest radius whose window contains them.
    struct Placement {
        std::uint64_t ones = 0, zeros = 0;
        int r = 0;
    };
    const auto& temps = x.templates()->templates;
    std::vector<std::vector<Placement>> per_center(cells);
    for (int cr = 0; cr < n; ++cr)
        for (int cc = 0; cc < n; ++cc) {
            std::map<std::pair<std::uint64_t, std::uint64_t>, int> best;
            for (std::int64_t r = 0; r <= R; ++r)
                for (const auto& t : temps) {
                    Box tb = t.bounding_box();
                    for (std::int64_t ar = cr - r; ar + tb.size[0] - 1 <= cr + r; ++ar)
                        for (std::int64_t ac = cc - r; ac + tb.size[1] - 1 <= cc + r; ++ac) {
                            std::uint64_t ones = 0, zeros = 0;
                            for (std::size_t q = 0; q < t.size(); ++q) {
                                int id = cell(ar + t.offsets()[q][0], ac + t.offsets()[q][1]);
                                (t.symbols()[q] ? ones : zeros) |= std::uint64_t(1) << id;
                            }
                            if (ones & zeros) continue;  // wraps onto itself with conflicting symbols
                            auto key = std::make_pair(ones, zeros);
                            if (!best.count(key)) best[key] = static_cast<int>(r);
                        }
                }
            auto& list = per_center[cr * n + cc];
            for (auto& [key, r] : best) list.push_back({key.first, key.second, r});
            std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.r < b.r; });
        }
    std::unordered_map<std::uint64_t, double> hist;
    const std::uint64_t total = std::uint64_t(1) << cells;
    for (std::uint64_t X = 0; X < total; ++X) {
        std::uint64_t key = 0;
        for (int c = 0; c < cells; ++c)
            for (const auto& p : per_center[c])
                if ((X & p.ones) == p.ones && (X & p.zeros) == 0) {
                    key += std::uint64_t(1) << (7 * p.r);
                    break;
                }
        hist[key] += 1;
    }
    for (auto& [key, mult] : hist) {
        std::vector<int> counts(R + 1);
        for (std::int64_t r = 0; r <= R; ++r) counts[r] = static_cast<int>((key >> (7 * r)) & 127);
        classes_.emplace_back(std::move(counts), mult);
    }
    std::sort(classes_.begin(), classes_.end());
}

double TorusModel::log_z_per_site(double beta) const {
    std::vector<double> logs;
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& [counts, mult] : classes_) {
        double e = 0;
        for (std::size_t r = 0; r < counts.size(); ++r) e -= counts[r] * a_[r];
        double l = std::log(mult) + beta * e;
        logs.push_back(l);
        mx = std::max(mx, l);
    }
    double s = 0;
    for (double l : logs) s += std::exp(l - mx);
    return (mx + std::log(s)) / double(n_ * n_);
}

PressurePoint torus_pressure_2d(const TruncatedPotential& pot, double beta, int n) {
    if (!(beta >= 0)) throw InputError("beta must be non-negative");
    PressurePoint p;
    p.beta = beta;
    p.method = "torus-2d";
    p.R = pot.radius();
    p.rigorous = false;
    p.note = "finite torus; no rigorous finite-size bound";
    p.estimate = TorusModel(pot, n).log_z_per_site(beta);
    if (n > 1) p.finite_size_slack = std::abs(p.estimate - TorusModel(pot, n - 1).log_z_per_site(beta));
    p.lower = p.estimate - beta * pot.error_bound();
    p.upper = p.estimate;
    return p;
}

// ---------------------------------------------------------------- slant fit and freezing

SlantFit fit_slant(const PressureCurve& curve, double tail_fraction) {
    const auto& pts = curve.points;
    const std::size_t N = pts.size();
    std::size_t m = std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(tail_fraction * double(N))));
    if (N < 3 || m > N) throw InputError("slant fit needs at least 3 tail points");
    SlantFit f;
    f.tail_start = N - m;
    double bbar = 0, ybar = 0;
    for (std::size_t i = f.tail_start; i < N; ++i) bbar += pts[i].beta, ybar += pts[i].estimate;
    bbar /= double(m);
    ybar /= double(m);
    double sxx = 0, sxy = 0;
    for (std::size_t i = f.tail_start; i < N; ++i) {
        sxx += (pts[i].beta - bbar) * (pts[i].beta - bbar);
        sxy += (pts[i].beta - bbar) * (pts[i].estimate - ybar);
    }
    if (!(sxx > 0)) throw InputError("slant fit needs distinct beta values");
    f.s_hat = sxy / sxx;
    f.h_hat = ybar - f.s_hat * bbar;
    // Numerical error of each estimate (distance to its upper bound plus the finite-size slack)
    // serves as its standard deviation; the one-sided truncation term enters only the threshold.
    auto sigma = [&](std::size_t i) { return (pts[i].upper - pts[i].estimate) + pts[i].finite_size_slack; };
    auto se_at = [&](double beta) {
        double v = 0;
        for (std::size_t i = f.tail_start; i < N; ++i) {
            double L = 1.0 / double(m) + (beta - bbar) * (pts[i].beta - bbar) / sxx;
            double sig = sigma(i);
            v += L * L * sig * sig;
        }
        return std::sqrt(v);
    };
    double var_s = 0, tail_slack = 0;
    for (std::size_t i = f.tail_start; i < N; ++i) {
        double c = (pts[i].beta - bbar) / sxx, sig = sigma(i);
        var_s += c * c * sig * sig;
    }
    for (std::size_t k = 0; k < N; ++k) {
        f.residuals.push_back(pts[k].estimate - (f.s_hat * pts[k].beta + f.h_hat));
        f.slack.push_back(pts[k].width() + pts[k].finite_size_slack + 2 * se_at(pts[k].beta));
        if (k >= f.tail_start) tail_slack = std::max(tail_slack, f.slack.back());
    }
    f.s_slack = tail_slack / (pts.back().beta - pts[f.tail_start].beta) + 2 * std::sqrt(var_s);
    for (std::size_t k = 0; k < N; ++k) {
        if (f.residuals[k] < -f.slack[k]) f.nonnegative = false;
        if (k && f.residuals[k] > f.residuals[k - 1] + f.slack[k] + f.slack[k - 1]) f.monotone = false;
    }
    return f;
}

FreezeReport detect_freeze(const PressureCurve& curve, double tail_fraction) {
    FreezeReport r;
    r.fit = fit_slant(curve, tail_fraction);
    const auto& g = r.fit.residuals;
    const auto& s = r.fit.slack;
    for (const auto& p : curve.points) r.betas.push_back(p.beta);
    std::size_t k = g.size();
    while (k > 0 && std::abs(g[k - 1]) <= s[k - 1]) --k;
    if (k == g.size()) {
        r.verdict = FreezeReport::Verdict::NotDetected;
        return r;
    }
    r.verdict = FreezeReport::Verdict::FrozenBeyond;
    for (std::size_t i = k; i < g.size(); ++i) r.max_tail_residual = std::max(r.max_tail_residual, std::abs(g[i]));
    if (k == 0) {
        r.affine_everywhere = true;
        r.beta_c_lo = r.beta_c_hi = r.betas[0];
    } else {
        r.beta_c_lo = r.betas[k - 1];
        r.beta_c_hi = r.betas[k];
    }
    return r;
}

nlohmann::json FreezeReport::to_json() const {
    nlohmann::json j;
    j["verdict"] = verdict == Verdict::FrozenBeyond ? "FrozenBeyond" : "NotDetected";
    if (verdict == Verdict::FrozenBeyond) j["beta_c_interval"] = {beta_c_lo, beta_c_hi};
    if (affine_everywhere) j["note"] = "affine everywhere; no transition";
    j["max_tail_residual"] = max_tail_residual;
    j["s_hat"] = fit.s_hat;
    j["h_hat"] = fit.h_hat;
    j["s_slack"] = fit.s_slack;
    j["residuals_monotone"] = fit.monotone;
    j["residuals_nonnegative"] = fit.nonnegative;
    j["residuals"] = nlohmann::json::array();
    for (std::size_t i = 0; i < betas.size(); ++i)
        j["residuals"].push_back({{"beta", betas[i]}, {"residual", fit.residuals[i]}, {"slack", fit.slack[i]}});
    return j;
}

PressureCurve evaluate_curve(const std::vector<double>& betas, const std::function<PressurePoint(double)>& f,
                             int workers) {
    PressureCurve c;
    c.points.resize(betas.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto run = [&] {
        for (std::size_t i; (i = next++) < betas.size();) {
            try {
                c.points[i] = f(betas[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    workers = std::max(1, std::min<int>(workers, static_cast<int>(betas.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    std::sort(c.points.begin(), c.points.end(), [](const auto& a, const auto& b) { return a.beta < b.beta; });
    return c;
}

}  // namespace thermo
