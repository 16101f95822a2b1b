#include "thermo/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "thermo/errors.hpp"
#include "thermo/format.hpp"

namespace thermo {

Box FiniteSpecification::collar_box() const {
    Box b = lambda;
    for (int i = 0; i < b.dim; ++i) {
        b.lo[i] -= 2 * n_max();
        b.size[i] += 4 * n_max();
    }
    return b;
}

double FiniteSpecification::energy(const Grid& full) const {
    double U = 0;
    for (std::int64_t n = 0; n <= n_max(); ++n) {
        if (phi.phi[n] == 0) continue;
        Box centers = lambda;
        for (int i = 0; i < centers.dim; ++i) {
            centers.lo[i] -= n;
            centers.size[i] += 2 * n;
        }
        for_each_point(centers, [&](const Point& c) {
            Box w = Box::cube(lambda.dim, -n, 2 * n + 1).translated(c);
            if (!x->admissible(full.crop(w))) U += phi.phi[n];
        });
    }
    return U;
}

namespace {

void check_spec(const FiniteSpecification& fs) {
    if (!fs.x) throw InputError("specification has no subshift");
    if (fs.lambda.dim != fs.x->dim() || fs.lambda.empty()) throw InputError("box dimension mismatch or empty box");
    if (!fs.boundary.box.contains(fs.collar_box())) throw InputError("boundary grid must cover the collar of width 2*n_max");
}

// log of the normalizer and the log-weights over all patterns on lambda.
std::vector<double> log_weights(const FiniteSpecification& fs, std::vector<Grid>* patterns, double guard) {
    const std::int64_t vol = fs.lambda.volume();
    const int k = static_cast<int>(fs.x->alphabet_size());
    double count = std::pow(double(k), double(vol));
    if (count > guard) throw ResourceError("box enumeration exceeds guard", guard);
    Grid full = fs.boundary.crop(fs.collar_box());
    std::vector<Point> cells;
    for_each_point(fs.lambda, [&](const Point& p) { cells.push_back(p); });
    std::vector<double> lw;
    const std::int64_t total = static_cast<std::int64_t>(count);
    for (std::int64_t code = 0; code < total; ++code) {
        std::int64_t c = code;
        Grid pat(fs.lambda);
        for (std::int64_t i = vol - 1; i >= 0; --i) {
            Symbol s = static_cast<Symbol>(c % k);
            c /= k;
            full.at(cells[i]) = s;
            pat.at(cells[i]) = s;
        }
        lw.push_back(fs.beta * fs.energy(full));
        if (patterns) patterns->push_back(std::move(pat));
    }
    return lw;
}

}  // namespace

std::vector<WeightedPattern> conditional_weights(const FiniteSpecification& fs, double guard) {
    check_spec(fs);
    std::vector<Grid> pats;
    auto lw = log_weights(fs, &pats, guard);
    double mx = *std::max_element(lw.begin(), lw.end());
    double z = 0;
    for (double l : lw) z += std::exp(l - mx);
    std::vector<WeightedPattern> out;
    for (std::size_t i = 0; i < lw.size(); ++i) out.push_back({std::move(pats[i]), std::exp(lw[i] - mx) / z});
    return out;
}

nlohmann::json weights_to_json(const std::vector<WeightedPattern>& w, const Alphabet& names) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : w) {
        std::vector<std::string> cells;
        for (auto s : p.pattern.cells) cells.push_back(names.name(s));
        j.push_back({{"cells", cells}, {"probability", p.probability}});
    }
    return j;
}

double dlr_discrepancy(const FiniteSpecification& fs, const Box& sub) {
    check_spec(fs);
    if (!fs.lambda.contains(sub) || sub.empty()) throw InputError("inner box must lie inside the outer box");
    auto outer = conditional_weights(fs);
    // Group outer weights by the pattern outside sub.
    std::map<std::vector<Symbol>, std::vector<const WeightedPattern*>> groups;
    std::vector<Point> rest;
    for_each_point(fs.lambda, [&](const Point& p) {
        if (!sub.contains(p)) rest.push_back(p);
    });
    for (const auto& w : outer) {
        std::vector<Symbol> key;
        for (const auto& p : rest) key.push_back(w.pattern.at(p));
        groups[key].push_back(&w);
    }
    double worst = 0;
    for (const auto& [key, members] : groups) {
        double mass = 0;
        for (auto* m : members) mass += m->probability;
        FiniteSpecification inner = fs;
        inner.lambda = sub;
        const WeightedPattern& any = *members.front();
        for (std::size_t i = 0; i < rest.size(); ++i) inner.boundary.at(rest[i]) = any.pattern.at(rest[i]);
        auto direct = conditional_weights(inner);
        std::map<std::vector<Symbol>, double> direct_p;
        for (const auto& d : direct) direct_p[d.pattern.cells] = d.probability;
        for (auto* m : members) {
            double cond = m->probability / mass;
            double d = direct_p.at(m->pattern.crop(sub).cells);
            worst = std::max(worst, std::abs(cond - d));
        }
    }
    return worst;
}

double full_support_rho(const InteractionFamily& phi, std::size_t alphabet_size, double beta) {
    if (alphabet_size == 0) throw InputError("empty alphabet");
    double norm = phi.strong_sum.empty() ? 0.0 : phi.strong_sum.back();
    return std::exp(-2.0 * beta * norm) / double(alphabet_size);
}

double rho_bound_margin(const std::vector<WeightedPattern>& w, double rho) {
    if (w.empty()) throw InputError("no weights");
    double vol = double(w.front().pattern.box.volume());
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& p : w) mn = std::min(mn, p.probability);
    // Compare in logs: rho^{|Lambda|} underflows for strong interactions.
    return std::exp(std::log(mn) - vol * std::log(rho));
}

std::string ChainState::telemetry_csv() const {
    std::ostringstream os;
    os << "step,energy,inadmissible_mass\n";
    for (const auto& r : telemetry) os << r.step << "," << fmt_num(r.energy) << "," << fmt_num(r.inadmissible_mass) << "\n";
    return os.str();
}

// ---------------------------------------------------------------- Metropolis

MetropolisChain::MetropolisChain(const TruncatedPotential& pot, int n, std::uint64_t seed)
    : x_(pot.subshift()), R_(static_cast<int>(pot.radius())), n_(n), dim_(pot.subshift().dim()) {
    if (dim_ != 1 && dim_ != 2) throw InputError("Metropolis sampler supports d = 1 or 2");
    if (R_ > 100) throw InputError("sampler radius too large");
    if (n < 2 * R_ + 2) throw InputError("torus side must be at least 2R+2");
    const auto* tmpl = x_.templates();
    if (!tmpl) throw InputError("sampler needs a local defect description of the target");
    for (int j = 0; j <= R_; ++j) a_.push_back(pot.sequence()(j));
    const std::int64_t cells = dim_ == 1 ? n : std::int64_t(n) * n;
    const int k = static_cast<int>(x_.alphabet_size());
    CounterRng rng(seed, 0x51);
    cfg_.resize(cells);
    for (auto& s : cfg_) s = static_cast<Symbol>(rng.below(k));
    auto wrap = [&](std::int64_t v) { return ((v % n) + n) % n; };
    auto index = [&](std::int64_t r, std::int64_t c) { return dim_ == 1 ? wrap(c) : wrap(r) * n + wrap(c); };
    auto delta = [&](std::int64_t v) {  // signed torus displacement in (-n/2, n/2]
        v = wrap(v);
        return v > n / 2 ? v - n : v;
    };
    by_site_.assign(cells, {});
    for (const auto& t : tmpl->templates) {
        for (std::int64_t anchor = 0; anchor < cells; ++anchor) {
            std::int64_t ar = dim_ == 1 ? 0 : anchor / n, ac = dim_ == 1 ? anchor : anchor % n;
            Placement p;
            std::map<std::int32_t, Symbol> req;
            bool conflict = false;
            for (std::size_t q = 0; q < t.size(); ++q) {
                const Point& o = t.offsets()[q];
                std::int64_t r = dim_ == 1 ? 0 : ar + o[0], c = dim_ == 1 ? ac + o[0] : ac + o[1];
                auto id = static_cast<std::int32_t>(index(r, c));
                auto [it, fresh] = req.emplace(id, t.symbols()[q]);
                if (!fresh && it->second != t.symbols()[q]) conflict = true;
            }
            if (conflict) continue;
            for (auto& [id, s] : req) p.cells.emplace_back(id, s);
            // Centers whose window of radius <= R contains the placement.
            for (std::int64_t center = 0; center < cells; ++center) {
                std::int64_t cr = dim_ == 1 ? 0 : center / n, cc = dim_ == 1 ? center : center % n;
                std::int64_t dr = delta(ar - cr), dc = delta(ac - cc);
                std::int64_t need = 0;
                bool ok = true;
                for (std::size_t q = 0; q < t.size(); ++q) {
                    const Point& o = t.offsets()[q];
                    std::int64_t pr = dim_ == 1 ? 0 : dr + o[0], pc = dim_ == 1 ? dc + o[0] : dc + o[1];
                    if (x_.one_sided()) {
                        if (pc < 0) ok = false;
                        need = std::max(need, pc + 1);
                    } else {
                        need = std::max({need, std::abs(pr), std::abs(pc)});
                    }
                }
                if (ok && need <= R_) p.centers.emplace_back(static_cast<std::int32_t>(center), static_cast<std::int8_t>(need));
            }
            if (p.centers.empty()) continue;
            auto pid = static_cast<std::int32_t>(place_.size());
            for (auto& [id, s] : p.cells) by_site_[id].push_back(pid);
            place_.push_back(std::move(p));
        }
    }
    cnt_.assign(cells * (R_ + 1), 0);
    expo_.assign(cells, static_cast<std::int8_t>(R_ + 1));
    for (std::size_t p = 0; p < place_.size(); ++p) {
        for (auto& [id, s] : place_[p].cells) place_[p].satisfied += cfg_[id] == s;
        if (place_[p].satisfied == static_cast<std::int32_t>(place_[p].cells.size()))
            for (auto [c, r] : place_[p].centers) ++cnt_[c * (R_ + 1) + r];
    }
    for (std::int64_t c = 0; c < cells; ++c) {
        expo_[c] = static_cast<std::int8_t>(exponent(static_cast<std::int32_t>(c)));
        energy_ += center_value(expo_[c]);
        bad_ += expo_[c] <= R_;
    }
}

int MetropolisChain::exponent(std::int32_t c) const {
    for (int r = 0; r <= R_; ++r)
        if (cnt_[c * (R_ + 1) + r]) return r;
    return R_ + 1;
}

double MetropolisChain::full_energy() const {
    double e = 0;
    std::vector<std::int32_t> cnt(cnt_.size(), 0);
    for (const auto& p : place_) {
        bool all = true;
        for (auto& [id, s] : p.cells) all = all && cfg_[id] == s;
        if (all)
            for (auto [c, r] : p.centers) ++cnt[c * (R_ + 1) + r];
    }
    for (std::int64_t c = 0; c < sites(); ++c) {
        int ex = R_ + 1;
        for (int r = 0; r <= R_ && ex > R_; ++r)
            if (cnt[c * (R_ + 1) + r]) ex = r;
        e += center_value(ex);
    }
    return e;
}

void MetropolisChain::toggle(std::int32_t p, int sign) {
    for (auto [c, r] : place_[p].centers) cnt_[c * (R_ + 1) + r] += sign;
}

void MetropolisChain::set(std::int64_t site, Symbol s) {
    const Symbol old = cfg_[site];
    if (old == s) return;
    std::vector<std::int32_t> touched;
    for (auto p : by_site_[site]) {
        auto& pl = place_[p];
        const auto full = static_cast<std::int32_t>(pl.cells.size());
        bool was = pl.satisfied == full;
        for (auto& [id, req] : pl.cells)
            if (id == site) pl.satisfied += (req == s) - (req == old);
        bool now = pl.satisfied == full;
        if (was != now) {
            toggle(p, now ? 1 : -1);
            for (auto [c, r] : pl.centers) touched.push_back(c);
        }
    }
    cfg_[site] = s;
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (auto c : touched) {
        int e = exponent(c);
        energy_ += center_value(e) - center_value(expo_[c]);
        bad_ += (e <= R_) - (expo_[c] <= R_);
        expo_[c] = static_cast<std::int8_t>(e);
    }
}

double MetropolisChain::delta(std::int64_t site, Symbol s) {
    const Symbol old = cfg_[site];
    const double before = energy_;
    set(site, s);
    double d = energy_ - before;
    set(site, old);
    energy_ = before;
    return d;
}

ChainState metropolis_run(const TruncatedPotential& pot, double beta, int n, std::uint64_t steps, std::uint64_t seed,
                          std::uint64_t telemetry_every) {
    if (!(beta >= 0)) throw InputError("beta must be non-negative");
    MetropolisChain chain(pot, n, seed);
    ChainState st;
    st.n = n;
    st.dim = pot.subshift().dim();
    st.seed = seed;
    const int k = static_cast<int>(pot.subshift().alphabet_size());
    CounterRng rng(seed, 0x77);
    const std::uint64_t burn = steps / 2;
    const double sites = double(chain.sites());
    std::vector<std::int64_t> sym_count(k, 0);
    for (auto s : chain.config()) ++sym_count[s];
    std::vector<double> sym_acc(k, 0.0);
    double mass_acc = 0;
    for (std::uint64_t t = 0; t < steps; ++t) {
        if (k > 1) {
            std::int64_t site = static_cast<std::int64_t>(rng.below(chain.sites()));
            Symbol old = chain.config()[site];
            Symbol s = static_cast<Symbol>((old + 1 + rng.below(k - 1)) % k);
            const double e0 = chain.energy();
            chain.set(site, s);
            double d = chain.energy() - e0;
            double u = rng.uniform();
            if (d >= 0 || u < std::exp(beta * d)) {
                ++st.accepted;
                --sym_count[old];
                ++sym_count[s];
            } else {
                chain.set(site, old);
            }
        }
        if (t >= burn) {
            mass_acc += double(chain.bad_centers()) / sites;
            for (int s = 0; s < k; ++s) sym_acc[s] += double(sym_count[s]) / sites;
            ++st.samples;
        }
        if (telemetry_every && (t + 1) % telemetry_every == 0)
            st.telemetry.push_back({t + 1, chain.energy(), double(chain.bad_centers()) / sites});
    }
    st.steps = steps;
    st.energy = chain.full_energy();
    st.config = chain.config();
    st.mean_inadmissible_mass = st.samples ? mass_acc / double(st.samples) : double(chain.bad_centers()) / sites;
    for (int s = 0; s < k; ++s)
        st.symbol_frequency.push_back(st.samples ? sym_acc[s] / double(st.samples) : double(sym_count[s]) / sites);
    return st;
}

}  // namespace thermo
