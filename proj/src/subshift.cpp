#include "thermo/subshift.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "thermo/errors.hpp"
#include "thermo/rng.hpp"

namespace thermo {

Alphabet::Alphabet(std::vector<std::string> symbols) : names_(std::move(symbols)) {
    if (names_.empty()) throw InputError("alphabet is empty");
    if (names_.size() > 255) throw InputError("alphabet has more than 255 symbols");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!index_.emplace(names_[i], static_cast<Symbol>(i)).second)
            throw InputError("duplicate alphabet symbol '" + names_[i] + "'");
    }
}

Symbol Alphabet::index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw InputError("symbol '" + name + "' is not in the alphabet");
    return it->second;
}

Box BoxWindow::box() const {
    if (n < 0) throw InputError("window size must be non-negative");
    switch (kind) {
        case Kind::Erg: return Box::cube(dim, 0, n);
        case Kind::Stat: return Box::cube(dim, -n, 2 * n + 1);
        case Kind::Prefix:
            if (dim != 1) throw InputError("prefix windows are one-dimensional");
            return Box::cube(1, 0, n);
    }
    return {};
}

std::string SubshiftSpec::kind_name() const {
    switch (kind.index()) {
        case 0: return "full";
        case 1: return "sft";
        case 2: return "substitution";
        default: return "single_point";
    }
}

std::int64_t BlockGraph::pow_k(int e) const {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= k;
    return r;
}

bool BlockGraph::admissible_word(const std::vector<Symbol>& w, const std::vector<bool>* mask) const {
    const int len = static_cast<int>(w.size());
    auto known = [&](int i) { return !mask || (*mask)[i]; };
    const std::int64_t nv = pow_k(memory);
    if (len <= memory) {
        const std::int64_t tail = pow_k(memory - len);
        for (std::int64_t v = 0; v < nv; ++v) {
            if (!vertex[v]) continue;
            std::int64_t pre = v / tail;
            bool ok = true;
            for (int i = len - 1; i >= 0; --i) {
                if (known(i) && pre % k != w[i]) {
                    ok = false;
                    break;
                }
                pre /= k;
            }
            if (ok) return true;
        }
        return false;
    }
    std::vector<std::uint8_t> cur(nv, 0), nxt(nv, 0);
    bool any = false;
    for (std::int64_t v = 0; v < nv; ++v) {
        if (!vertex[v]) continue;
        std::int64_t code = v;
        bool ok = true;
        for (int i = memory - 1; i >= 0; --i) {
            if (known(i) && code % k != w[i]) {
                ok = false;
                break;
            }
            code /= k;
        }
        if (ok) cur[v] = 1, any = true;
    }
    if (!any) return false;
    for (int i = memory; i < len; ++i) {
        std::fill(nxt.begin(), nxt.end(), 0);
        any = false;
        for (std::int64_t v = 0; v < nv; ++v) {
            if (!cur[v]) continue;
            for (int a = 0; a < k; ++a) {
                if (known(i) && a != w[i]) continue;
                std::int64_t e = v * k + a;
                if (!edge[e]) continue;
                nxt[e % nv] = 1;
                any = true;
            }
        }
        if (!any) return false;
        std::swap(cur, nxt);
    }
    return true;
}

namespace {

bool placement_matches(const Pattern& t, const Grid& g, const Point& anchor, const std::vector<bool>* mask,
                       bool require_known) {
    const auto& off = t.offsets();
    const auto& sym = t.symbols();
    for (std::size_t c = 0; c < off.size(); ++c) {
        Point q = anchor + off[c];
        if (!g.box.contains(q)) return false;
        auto idx = g.box.index(q);
        if (mask && !(*mask)[idx]) {
            if (require_known) return false;
            continue;
        }
        if (g.cells[idx] != sym[c]) return false;
    }
    return true;
}

Pattern normalize(const Pattern& p) {
    Box b = p.bounding_box();
    Point shift;
    for (int i = 0; i < p.dim(); ++i) shift[i] = -b.lo[i];
    return p.translated(shift);
}

std::unique_ptr<BlockGraph> build_block_graph(const SubshiftSpec& s) {
    auto g = std::make_unique<BlockGraph>();
    g->k = static_cast<int>(s.alphabet.size());
    const int k = g->k;
    if (const auto* full = std::get_if<FullShiftKind>(&s.kind)) {
        g->memory = 0;
        g->edge.assign(k, 0);
        for (auto a : full->sub_alphabet) g->edge[a] = 1;
    } else if (const auto* sp = std::get_if<SinglePointKind>(&s.kind)) {
        g->memory = 0;
        g->edge.assign(k, 0);
        g->edge[sp->symbol] = 1;
    } else if (const auto* sft = std::get_if<SftKind>(&s.kind)) {
        std::int64_t span = 1;
        for (const auto& f : sft->forbidden) span = std::max(span, f.bounding_box().size[0]);
        g->memory = static_cast<int>(span - 1);
        double edges = std::pow(static_cast<double>(k), g->memory + 1);
        if (edges > double(1 << 22)) throw ResourceError("1D SFT block graph too large", double(1 << 22));
        const std::int64_t ne = g->pow_k(g->memory + 1);
        g->edge.assign(ne, 1);
        std::vector<Pattern> norm;
        for (const auto& f : sft->forbidden) norm.push_back(normalize(f));
        Box wb = Box::cube(1, 0, g->memory + 1);
        Grid word(wb);
        for (std::int64_t e = 0; e < ne; ++e) {
            std::int64_t c = e;
            for (int i = g->memory; i >= 0; --i) {
                word.cells[i] = static_cast<Symbol>(c % k);
                c /= k;
            }
            for (const auto& f : norm) {
                std::int64_t span_f = f.bounding_box().size[0];
                for (std::int64_t a = 0; a + span_f <= g->memory + 1 && g->edge[e]; ++a)
                    if (placement_matches(f, word, Point::of({a}), nullptr, true)) g->edge[e] = 0;
            }
        }
    } else {
        return nullptr;
    }
    const int M = g->memory;
    const std::int64_t nv = g->pow_k(M);
    const std::int64_t ne = nv * k;
    // Prune to the essential part.
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::int64_t> indeg(nv, 0), outdeg(nv, 0);
        for (std::int64_t e = 0; e < ne; ++e)
            if (g->edge[e]) ++outdeg[e / k], ++indeg[e % nv];
        for (std::int64_t e = 0; e < ne; ++e) {
            if (!g->edge[e]) continue;
            bool dead = outdeg[e % nv] == 0;
            if (!s.one_sided() && indeg[e / k] == 0) dead = true;
            if (dead) g->edge[e] = 0, changed = true;
        }
    }
    g->vertex.assign(nv, 0);
    bool any = false;
    for (std::int64_t e = 0; e < ne; ++e)
        if (g->edge[e]) g->vertex[e / k] = 1, any = true;
    if (!any) throw InputError("subshift is empty: no bi-infinite admissible configuration");
    g->admissible_short.resize(M + 1);
    g->admissible_short[0] = {1};
    for (int l = 1; l <= M; ++l) {
        const std::int64_t nl = g->pow_k(l), tail = g->pow_k(M - l);
        g->admissible_short[l].assign(nl, 0);
        for (std::int64_t v = 0; v < nv; ++v)
            if (g->vertex[v]) g->admissible_short[l][v / tail] = 1;
        for (auto ok : g->admissible_short[l])
            if (!ok) g->short_complete = false;
    }
    return g;
}

// Minimal inadmissible words of length <= M+1 for a block graph.
std::unique_ptr<DefectTemplates> block_templates(const BlockGraph& g) {
    auto t = std::make_unique<DefectTemplates>();
    t->exact = true;
    const int k = g.k, M = g.memory;
    auto word_of = [&](std::int64_t code, int len) {
        std::vector<Symbol> w(len);
        for (int i = len - 1; i >= 0; --i) {
            w[i] = static_cast<Symbol>(code % k);
            code /= k;
        }
        return w;
    };
    auto ok = [&](std::int64_t code, int len) -> bool {
        if (len <= M) return g.admissible_short[len][code];
        return g.edge[code] != 0;
    };
    for (int len = 1; len <= M + 1; ++len) {
        const std::int64_t n = g.pow_k(len);
        for (std::int64_t code = 0; code < n; ++code) {
            if (ok(code, len)) continue;
            if (len > 1) {
                std::int64_t pre = code / k, suf = code % g.pow_k(len - 1);
                if (!ok(pre, len - 1) || !ok(suf, len - 1)) continue;
            }
            t->templates.push_back(Pattern::word(word_of(code, len)));
        }
    }
    return t;
}

bool is_primitive(const SubstitutionKind& sub, std::size_t n) {
    std::vector<std::vector<std::uint8_t>> inc(n, std::vector<std::uint8_t>(n, 0));
    for (std::size_t a = 0; a < n; ++a)
        for (auto s : sub.rules[a].cells) inc[a][s] = 1;
    auto power = inc;
    const std::size_t limit = (n - 1) * (n - 1) + 1;
    for (std::size_t t = 1; t <= limit; ++t) {
        bool all = true;
        for (auto& row : power)
            for (auto v : row) all = all && v;
        if (all) return true;
        std::vector<std::vector<std::uint8_t>> next(n, std::vector<std::uint8_t>(n, 0));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (power[a][b])
                    for (std::size_t c = 0; c < n; ++c)
                        if (inc[b][c]) next[a][c] = 1;
        power = std::move(next);
    }
    return false;
}

void validate_spec(const SubshiftSpec& s) {
    if (s.dim < 1 || s.dim > kMaxDim)
        throw InputError("dimension must be between 1 and " + std::to_string(kMaxDim));
    if (s.one_sided() && s.dim != 1) throw InputError("one-sided subshifts must be one-dimensional");
    const auto n = s.alphabet.size();
    auto check_sym = [&](Symbol a) {
        if (a >= n) throw InputError("symbol index outside the alphabet");
    };
    if (const auto* full = std::get_if<FullShiftKind>(&s.kind)) {
        if (full->sub_alphabet.empty()) throw InputError("full shift sub-alphabet is empty");
        for (auto a : full->sub_alphabet) check_sym(a);
    } else if (const auto* sft = std::get_if<SftKind>(&s.kind)) {
        for (const auto& f : sft->forbidden) {
            if (f.size() == 0) throw InputError("forbidden pattern has empty shape");
            if (f.dim() != s.dim) throw InputError("forbidden pattern dimension mismatch");
            for (auto a : f.symbols()) check_sym(a);
        }
    } else if (const auto* sub = std::get_if<SubstitutionKind>(&s.kind)) {
        if (static_cast<int>(sub->box_dims.size()) != s.dim)
            throw InputError("substitution box has wrong dimension");
        for (auto m : sub->box_dims)
            if (m < 2) throw InputError("substitution box sides must be >= 2");
        if (sub->rules.size() != n) throw InputError("substitution needs a rule for every symbol");
        Box expect;
        expect.dim = s.dim;
        for (int i = 0; i < s.dim; ++i) expect.size[i] = sub->box_dims[i];
        for (const auto& r : sub->rules) {
            if (!(r.box == expect)) throw InputError("substitution rule shape differs from the declared box");
            for (auto a : r.cells) check_sym(a);
        }
        if (s.one_sided()) throw InputError("substitution subshifts are two-sided");
        if (!is_primitive(*sub, n)) throw InputError("substitution is not primitive");
    } else if (const auto* sp = std::get_if<SinglePointKind>(&s.kind)) {
        check_sym(sp->symbol);
    }
}

}  // namespace

bool template_matches(const Pattern& t, const Grid& g, const Point& anchor) {
    return placement_matches(t, g, anchor, nullptr, true);
}

Subshift::Subshift(SubshiftSpec spec) : spec_(std::move(spec)) {
    validate_spec(spec_);
    const auto n = spec_.alphabet.size();
    if (spec_.dim == 1) block_ = build_block_graph(spec_);
    if (block_) {
        templates_ = block_templates(*block_);
    } else if (const auto* full = std::get_if<FullShiftKind>(&spec_.kind)) {
        templates_ = std::make_unique<DefectTemplates>();
        templates_->exact = true;
        for (std::size_t a = 0; a < n; ++a)
            if (std::find(full->sub_alphabet.begin(), full->sub_alphabet.end(), a) == full->sub_alphabet.end())
                templates_->templates.emplace_back(spec_.dim, std::vector<Point>{Point{}},
                                                   std::vector<Symbol>{static_cast<Symbol>(a)});
    } else if (const auto* sp = std::get_if<SinglePointKind>(&spec_.kind)) {
        templates_ = std::make_unique<DefectTemplates>();
        templates_->exact = true;
        for (std::size_t a = 0; a < n; ++a)
            if (a != sp->symbol)
                templates_->templates.emplace_back(spec_.dim, std::vector<Point>{Point{}},
                                                   std::vector<Symbol>{static_cast<Symbol>(a)});
    } else if (const auto* sft = std::get_if<SftKind>(&spec_.kind)) {
        std::vector<std::uint8_t> used(n, 0);
        for (const auto& f : sft->forbidden)
            for (auto a : f.symbols()) used[a] = 1;
        for (std::size_t a = 0; a < n; ++a)
            if (!used[a]) {
                safe_fill_ = static_cast<int>(a);
                break;
            }
        templates_ = std::make_unique<DefectTemplates>();
        templates_->exact = safe_fill_ >= 0;
        for (const auto& f : sft->forbidden) templates_->templates.push_back(normalize(f));
    } else if (is_substitution()) {
        std::set<std::vector<Symbol>> seen;
        std::vector<Grid> frontier;
        const Box unit = Box::cube(spec_.dim, 0, 2);
        auto harvest = [&](const Grid& img) {
            Box anchors = img.box;
            for (int i = 0; i < spec_.dim; ++i) anchors.size[i] -= 1;
            for_each_point(anchors, [&](const Point& a) {
                Box b = unit.translated(a);
                Grid blk = img.crop(b);
                blk.box = unit;
                if (seen.insert(blk.cells).second) frontier.push_back(blk);
            });
        };
        for (std::size_t a = 0; a < n; ++a) {
            Grid g(Box::cube(spec_.dim, 0, 1), static_cast<Symbol>(a));
            harvest(expand(g, 1));
        }
        while (!frontier.empty()) {
            Grid b = frontier.back();
            frontier.pop_back();
            legal_blocks_.push_back(b);
            harvest(expand(b, 1));
        }
        std::sort(legal_blocks_.begin(), legal_blocks_.end(),
                  [](const Grid& a, const Grid& b) { return a.cells < b.cells; });
    }
}

bool Subshift::is_substitution() const { return std::holds_alternative<SubstitutionKind>(spec_.kind); }

int Subshift::extension_radius() const {
    if (spec_.extension_radius >= 0) return spec_.extension_radius;
    int r = 1;
    if (const auto* sft = std::get_if<SftKind>(&spec_.kind))
        for (const auto& f : sft->forbidden) {
            Box b = f.bounding_box();
            for (int i = 0; i < spec_.dim; ++i) r = std::max<int>(r, static_cast<int>(b.size[i]));
        }
    return r;
}

Grid Subshift::expand(const Grid& g, int k) const {
    const auto* sub = std::get_if<SubstitutionKind>(&spec_.kind);
    if (!sub) throw InputError("substitution_expand needs a substitution spec");
    Grid cur = g;
    for (int step = 0; step < k; ++step) {
        Box nb;
        nb.dim = cur.box.dim;
        for (int i = 0; i < nb.dim; ++i) {
            nb.lo[i] = cur.box.lo[i] * sub->box_dims[i];
            nb.size[i] = cur.box.size[i] * sub->box_dims[i];
        }
        Grid next(nb);
        const Box& rb = sub->rules[0].box;
        for (std::int64_t c = 0; c < cur.box.volume(); ++c) {
            Point p = cur.box.point(c);
            const Grid& rule = sub->rules[cur.cells[c]];
            for (std::int64_t r = 0; r < rb.volume(); ++r) {
                Point q = rb.point(r);
                Point t;
                for (int i = 0; i < nb.dim; ++i) t[i] = p[i] * sub->box_dims[i] + q[i];
                next.at(t) = rule.cells[r];
            }
        }
        cur = std::move(next);
    }
    return cur;
}

int Subshift::substitution_level(const Point& sizes) const {
    const auto& sub = std::get<SubstitutionKind>(spec_.kind);
    int k = 0;
    for (;;) {
        bool ok = true;
        for (int i = 0; i < spec_.dim; ++i) {
            double side = std::pow(static_cast<double>(sub.box_dims[i]), k);
            if (side < static_cast<double>(sizes[i])) ok = false;
        }
        if (ok) return k;
        ++k;
    }
}

const std::vector<Grid>& Subshift::block_images(int k) const {
    auto it = image_cache_.find(k);
    if (it != image_cache_.end()) return it->second;
    const auto& sub = std::get<SubstitutionKind>(spec_.kind);
    double vol = static_cast<double>(legal_blocks_.size());
    for (int i = 0; i < spec_.dim; ++i) vol *= 2.0 * std::pow(static_cast<double>(sub.box_dims[i]), k);
    if (vol > double(1 << 26)) throw ResourceError("substitution image union too large", double(1 << 26));
    std::vector<Grid> images;
    for (const auto& b : legal_blocks_) images.push_back(expand(b, k));
    return image_cache_.emplace(k, std::move(images)).first->second;
}

void Subshift::check_symbols(const Pattern& p) const {
    if (p.dim() != spec_.dim) throw InputError("pattern dimension differs from the subshift");
    for (auto s : p.symbols())
        if (s >= spec_.alphabet.size()) throw InputError("pattern symbol outside the alphabet");
}

bool Subshift::admissible(const Pattern& p) const {
    check_symbols(p);
    std::vector<bool> mask;
    Grid g = p.to_grid(&mask);
    if (p.is_box()) return admissible_masked(g, nullptr);
    return admissible_masked(g, &mask);
}

bool Subshift::admissible(const Grid& g) const {
    if (g.box.dim != spec_.dim) throw InputError("pattern dimension differs from the subshift");
    for (auto s : g.cells)
        if (s >= spec_.alphabet.size()) throw InputError("pattern symbol outside the alphabet");
    if (g.box.empty()) throw InputError("pattern shape is empty");
    return admissible_masked(g, nullptr);
}

bool Subshift::admissible_masked(const Grid& g, const std::vector<bool>* mask) const {
    auto known = [&](std::size_t i) { return !mask || (*mask)[i]; };
    if (const auto* full = std::get_if<FullShiftKind>(&spec_.kind)) {
        for (std::size_t i = 0; i < g.cells.size(); ++i)
            if (known(i) && std::find(full->sub_alphabet.begin(), full->sub_alphabet.end(), g.cells[i]) ==
                                full->sub_alphabet.end())
                return false;
        return true;
    }
    if (const auto* sp = std::get_if<SinglePointKind>(&spec_.kind)) {
        for (std::size_t i = 0; i < g.cells.size(); ++i)
            if (known(i) && g.cells[i] != sp->symbol) return false;
        return true;
    }
    if (block_) return block_->admissible_word(g.cells, mask);
    if (is_substitution()) return admissible_substitution(g, mask);
    return admissible_sft_nd(g, mask);
}

bool Subshift::admissible_substitution(const Grid& g, const std::vector<bool>* mask) const {
    int k = substitution_level(g.box.size);
    const auto& images = block_images(k);
    Pattern shape;
    {
        std::vector<Point> off;
        std::vector<Symbol> sym;
        for (std::int64_t c = 0; c < g.box.volume(); ++c) {
            if (mask && !(*mask)[c]) continue;
            off.push_back(g.box.point(c) - g.box.lo);
            sym.push_back(g.cells[c]);
        }
        shape = Pattern(spec_.dim, std::move(off), std::move(sym));
    }
    for (const auto& img : images) {
        Box anchors = img.box;
        for (int i = 0; i < spec_.dim; ++i) anchors.size[i] -= g.box.size[i] - 1;
        if (anchors.empty()) continue;
        bool found = false;
        const auto v = anchors.volume();
        for (std::int64_t a = 0; a < v && !found; ++a)
            found = placement_matches(shape, img, anchors.point(a), nullptr, true);
        if (found) return true;
    }
    return false;
}

bool Subshift::admissible_sft_nd(const Grid& g, const std::vector<bool>* mask) const {
    const auto& forb = templates_->templates;
    // Local check on fully known placements.
    for (const auto& f : forb) {
        Box fb = f.bounding_box();
        Box anchors = g.box;
        for (int i = 0; i < spec_.dim; ++i) anchors.size[i] -= fb.size[i] - 1;
        if (anchors.empty()) continue;
        const auto v = anchors.volume();
        for (std::int64_t a = 0; a < v; ++a)
            if (placement_matches(f, g, anchors.point(a), mask, true)) return false;
    }
    if (safe_fill_ >= 0) return true;  // holes and surroundings filled with the safe symbol
    // Bounded-radius extension search on the enlarged box.
    const int rho = extension_radius();
    Box e = g.box;
    for (int i = 0; i < spec_.dim; ++i) {
        e.lo[i] -= rho;
        e.size[i] += 2 * rho;
    }
    Grid work(e);
    std::vector<bool> assigned(static_cast<std::size_t>(e.volume()), false);
    std::vector<std::int64_t> todo;
    for (std::int64_t c = 0; c < e.volume(); ++c) {
        Point p = e.point(c);
        if (g.box.contains(p)) {
            auto gi = g.box.index(p);
            if (!mask || (*mask)[gi]) {
                work.cells[c] = g.cells[gi];
                assigned[c] = true;
                continue;
            }
        }
        todo.push_back(c);
    }
    const int k = static_cast<int>(spec_.alphabet.size());
    auto conflict_at = [&](std::int64_t c) {
        Point q = e.point(c);
        for (const auto& f : forb) {
            for (const auto& o : f.offsets()) {
                Point anchor = q - o;
                if (placement_matches(f, work, anchor, &assigned, true)) return true;
            }
        }
        return false;
    };
    std::vector<int> choice(todo.size(), -1);
    std::size_t depth = 0;
    std::int64_t budget = 2'000'000;
    while (true) {
        if (depth == todo.size()) return true;
        if (--budget < 0) throw ResourceError("extension search budget exhausted", 2e6);
        auto c = todo[depth];
        int& s = choice[depth];
        ++s;
        assigned[c] = false;
        bool placed = false;
        for (; s < k; ++s) {
            work.cells[c] = static_cast<Symbol>(s);
            assigned[c] = true;
            if (!conflict_at(c)) {
                placed = true;
                break;
            }
            assigned[c] = false;
        }
        if (placed) {
            ++depth;
        } else {
            s = -1;
            if (depth == 0) return false;
            --depth;
        }
    }
}

bool pattern_admissible(const Subshift& x, const Pattern& p) { return x.admissible(p); }

namespace {

void check_enum_guard(double candidates, const EnumerationGuard& guard) {
    if (candidates > guard.max_candidates)
        throw ResourceError("enumeration search space exceeds guard", guard.max_candidates);
}

}  // namespace

std::vector<Pattern> enumerate_language(const Subshift& x, const BoxWindow& w, const EnumerationGuard& guard) {
    if (w.dim != x.dim()) throw InputError("window dimension differs from the subshift");
    const Box box = w.box();
    if (box.empty()) throw InputError("window is empty");
    const auto vol = box.volume();
    const int k = static_cast<int>(x.alphabet_size());
    std::vector<Grid> out;
    auto push = [&](const Grid& g) {
        if (static_cast<double>(out.size()) >= guard.max_patterns)
            throw ResourceError("language size exceeds guard", guard.max_patterns);
        out.push_back(g);
    };
    const auto& spec = x.spec();
    if (const auto* sp = std::get_if<SinglePointKind>(&spec.kind)) {
        push(Grid(box, sp->symbol));
    } else if (x.is_substitution()) {
        int lvl = x.substitution_level(box.size);
        std::set<std::vector<Symbol>> seen;
        for (const auto& img : x.block_images(lvl)) {
            Box anchors = img.box;
            for (int i = 0; i < x.dim(); ++i) anchors.size[i] -= box.size[i] - 1;
            for_each_point(anchors, [&](const Point& a) {
                Box b = box.translated(a - box.lo);
                Grid f = img.crop(b);
                f.box = box;
                if (seen.insert(f.cells).second) push(f);
            });
        }
    } else {
        // Depth-first fill in row-major order, pruning on partial admissibility.
        const BlockGraph* bg = x.block_graph();
        const DefectTemplates* tpl = x.templates();
        if (!bg) check_enum_guard(std::pow(double(k), double(vol)), guard);
        Grid g(box);
        std::vector<bool> assigned(static_cast<std::size_t>(vol), false);
        std::vector<int> choice(static_cast<std::size_t>(vol), -1);
        auto partial_ok = [&](std::int64_t c) {
            if (bg) {
                std::vector<Symbol> word(g.cells.begin(), g.cells.begin() + c + 1);
                return bg->admissible_word(word);
            }
            Point q = box.point(c);
            for (const auto& f : tpl->templates)
                for (const auto& o : f.offsets())
                    if (placement_matches(f, g, q - o, &assigned, true)) return false;
            return true;
        };
        std::int64_t depth = 0;
        while (depth >= 0) {
            if (depth == vol) {
                if (bg || x.admissible(g)) push(g);
                --depth;
                continue;
            }
            int& s = choice[depth];
            ++s;
            assigned[depth] = false;
            bool placed = false;
            for (; s < k; ++s) {
                g.cells[depth] = static_cast<Symbol>(s);
                assigned[depth] = true;
                if (partial_ok(depth)) {
                    placed = true;
                    break;
                }
                assigned[depth] = false;
            }
            if (placed) {
                ++depth;
            } else {
                s = -1;
                --depth;
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Grid& a, const Grid& b) { return a.cells < b.cells; });
    std::vector<Pattern> result;
    result.reserve(out.size());
    for (const auto& g : out) result.push_back(Pattern::from_grid(g));
    return result;
}

Pattern substitution_expand(const Subshift& x, Symbol s, int k, double max_volume) {
    const auto* sub = std::get_if<SubstitutionKind>(&x.spec().kind);
    if (!sub) throw InputError("substitution_expand needs a substitution spec");
    if (s >= x.alphabet_size()) throw InputError("symbol outside the alphabet");
    if (k < 0) throw InputError("substitution power must be non-negative");
    double vol = 1;
    for (auto m : sub->box_dims) vol *= std::pow(static_cast<double>(m), k);
    if (vol > max_volume) throw ResourceError("substitution image too large", max_volume);
    Grid g(Box::cube(x.dim(), 0, 1), s);
    return Pattern::from_grid(x.expand(g, k));
}

Grid generate_grid(const Subshift& x, const Box& box, std::uint64_t seed) {
    if (box.dim != x.dim()) throw InputError("window dimension differs from the subshift");
    if (box.empty()) throw InputError("window is empty");
    CounterRng rng(seed, 0x67656e);
    Grid g(box);
    const auto& spec = x.spec();
    const int k = static_cast<int>(x.alphabet_size());
    if (const auto* sp = std::get_if<SinglePointKind>(&spec.kind)) {
        std::fill(g.cells.begin(), g.cells.end(), sp->symbol);
        return g;
    }
    if (const auto* full = std::get_if<FullShiftKind>(&spec.kind)) {
        for (auto& c : g.cells) c = full->sub_alphabet[rng.below(full->sub_alphabet.size())];
        return g;
    }
    if (const BlockGraph* bg = x.block_graph()) {
        // Random walk on the essential block graph.
        const std::int64_t nv = bg->pow_k(bg->memory);
        std::vector<std::int64_t> verts;
        for (std::int64_t v = 0; v < nv; ++v)
            if (bg->vertex[v]) verts.push_back(v);
        std::int64_t v = verts[rng.below(verts.size())];
        std::vector<Symbol> word;
        std::int64_t c = v;
        std::vector<Symbol> head(bg->memory);
        for (int i = bg->memory - 1; i >= 0; --i) {
            head[i] = static_cast<Symbol>(c % k);
            c /= k;
        }
        word = head;
        while (static_cast<std::int64_t>(word.size()) < box.volume()) {
            std::vector<int> next;
            for (int a = 0; a < k; ++a)
                if (bg->edge[v * k + a]) next.push_back(a);
            int a = next[rng.below(next.size())];
            word.push_back(static_cast<Symbol>(a));
            v = (v * k + a) % nv;
        }
        word.resize(static_cast<std::size_t>(box.volume()));
        g.cells = word;
        return g;
    }
    if (x.is_substitution()) {
        int lvl = x.substitution_level(box.size);
        const auto& images = x.block_images(lvl);
        const Grid& img = images[rng.below(images.size())];
        Point a;
        for (int i = 0; i < x.dim(); ++i) a[i] = static_cast<std::int64_t>(rng.below(img.box.size[i] - box.size[i] + 1));
        Grid f = img.crop(box.translated(a - box.lo));
        f.box = box;
        return f;
    }
    // Backtracking fill for d >= 2 SFTs with a seeded symbol order per cell.
    const auto& forb = x.templates()->templates;
    const auto vol = box.volume();
    std::vector<bool> assigned(static_cast<std::size_t>(vol), false);
    std::vector<std::vector<Symbol>> order(static_cast<std::size_t>(vol));
    for (auto& o : order) {
        for (int a = 0; a < k; ++a) o.push_back(static_cast<Symbol>(a));
        for (int i = k - 1; i > 0; --i) std::swap(o[i], o[rng.below(i + 1)]);
    }
    auto conflict_at = [&](std::int64_t c) {
        Point q = box.point(c);
        for (const auto& f : forb)
            for (const auto& o : f.offsets())
                if (placement_matches(f, g, q - o, &assigned, true)) return true;
        return false;
    };
    std::vector<int> choice(static_cast<std::size_t>(vol), -1);
    std::int64_t depth = 0, budget = 5'000'000;
    while (true) {
        if (depth == vol) {
            if (x.admissible(g)) return g;
            --depth;
            continue;
        }
        if (depth < 0 || --budget < 0)
            throw EmptyWindowError("no admissible fill found: empty-window evidence for this window");
        int& s = choice[depth];
        ++s;
        assigned[depth] = false;
        bool placed = false;
        for (; s < k; ++s) {
            g.cells[depth] = order[depth][s];
            assigned[depth] = true;
            if (!conflict_at(depth)) {
                placed = true;
                break;
            }
            assigned[depth] = false;
        }
        if (placed) {
            ++depth;
        } else {
            s = -1;
            --depth;
        }
    }
}

Pattern generate_configuration(const Subshift& x, const BoxWindow& w, std::uint64_t seed) {
    return Pattern::from_grid(generate_grid(x, w.box(), seed));
}

}  // namespace thermo
