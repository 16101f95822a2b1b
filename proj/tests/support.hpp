// Fixture subshifts, brute-force oracles and seeded generators shared by the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "thermo/lattice.hpp"
#include "thermo/rng.hpp"
#include "thermo/spec_io.hpp"
#include "thermo/subshift.hpp"

namespace fixtures {

using thermo::Subshift;

inline std::shared_ptr<const Subshift> make(const std::string& json_text) {
    return std::make_shared<const Subshift>(thermo::spec_from_json(nlohmann::json::parse(json_text)));
}

inline std::string sided(bool one) { return one ? "\"one\"" : "\"two\""; }

inline std::shared_ptr<const Subshift> golden(bool one_sided = false) {
    return make(R"({"alphabet":["0","1"],"dimension":1,"sided":)" + sided(one_sided) +
                R"(,"kind":{"type":"sft","forbidden":[{"offsets":[0,1],"cells":["1","1"]}]}})");
}

inline std::shared_ptr<const Subshift> single_point(bool one_sided = false, int dim = 1) {
    return make(R"({"alphabet":["0","1"],"dimension":)" + std::to_string(dim) + R"(,"sided":)" +
                sided(one_sided) + R"(,"kind":{"type":"single_point","symbol":"0"}})");
}

inline std::shared_ptr<const Subshift> full(int k, int dim = 1) {
    std::string a;
    for (int i = 0; i < k; ++i) a += (i ? ",\"" : "\"") + std::to_string(i) + "\"";
    return make(R"({"alphabet":[)" + a + R"(],"dimension":)" + std::to_string(dim) +
                R"(,"kind":{"type":"full"}})");
}

inline std::shared_ptr<const Subshift> hard_squares() {
    return make(R"({"alphabet":["0","1"],"dimension":2,"kind":{"type":"sft","forbidden":[
        {"offsets":[[0,0],[1,0]],"cells":["1","1"]},{"offsets":[[0,0],[0,1]],"cells":["1","1"]}]}})");
}

inline std::shared_ptr<const Subshift> thue_morse() {
    return make(R"({"alphabet":["0","1"],"dimension":1,
        "kind":{"type":"substitution","box":[2],"rules":{"0":["0","1"],"1":["1","0"]}}})");
}

inline thermo::Grid word_grid(const std::vector<thermo::Symbol>& w, std::int64_t origin = 0) {
    thermo::Grid g(thermo::Box::cube(1, origin, static_cast<std::int64_t>(w.size())));
    g.cells = w;
    return g;
}

inline std::vector<thermo::Symbol> bits(const std::string& s) {
    std::vector<thermo::Symbol> w;
    for (char c : s) w.push_back(static_cast<thermo::Symbol>(c - '0'));
    return w;
}

}  // namespace fixtures

namespace oracle {

using Word = std::vector<thermo::Symbol>;

inline std::vector<Word> all_words(int k, int n) {
    std::vector<Word> out;
    Word w(n, 0);
    for (;;) {
        out.push_back(w);
        int i = n - 1;
        while (i >= 0 && w[i] == k - 1) w[i--] = 0;
        if (i < 0) return out;
        ++w[i];
    }
}

inline bool has_11(const Word& w) {
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] && w[i - 1]) return true;
    return false;
}

// Thue-Morse word of length 2^k from symbol 0 via the parity-of-popcount formula.
inline Word thue_morse_prefix(int k) {
    Word w(std::size_t(1) << k);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<thermo::Symbol>(__builtin_popcountll(i) & 1);
    return w;
}

inline std::set<Word> thue_morse_factors(int n, int k = 12) {
    Word t = thue_morse_prefix(k);
    std::set<Word> f;
    for (std::size_t i = 0; i + n <= t.size(); ++i) f.insert(Word(t.begin() + i, t.begin() + i + n));
    return f;
}

// Hard-squares n x n blocks by brute force over all 2^(n^2) fillings.
inline std::int64_t hard_square_blocks(int n) {
    std::int64_t c = 0;
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << (n * n)); ++m) {
        bool ok = true;
        for (int r = 0; r < n && ok; ++r)
            for (int q = 0; q < n && ok; ++q) {
                bool b = (m >> (r * n + q)) & 1;
                if (b && q + 1 < n && ((m >> (r * n + q + 1)) & 1)) ok = false;
                if (b && r + 1 < n && ((m >> ((r + 1) * n + q)) & 1)) ok = false;
            }
        c += ok;
    }
    return c;
}

// Distance exponent of a two-sided 1D window: smallest r with [c-r, c+r] inadmissible.
template <class Bad>
inline int exponent_1d(const Word& w, int c, int R, Bad bad_interval) {
    for (int r = 0; r <= R; ++r)
        if (bad_interval(w, c - r, c + r)) return r;
    return R + 1;
}

inline bool interval_has_one(const Word& w, int lo, int hi) {
    for (int i = lo; i <= hi; ++i)
        if (w[i]) return true;
    return false;
}

inline bool interval_has_11(const Word& w, int lo, int hi) {
    for (int i = lo; i < hi; ++i)
        if (w[i] && w[i + 1]) return true;
    return false;
}

}  // namespace oracle

namespace gen {

// Random binary word with density p of ones.
inline oracle::Word word(thermo::CounterRng& rng, std::size_t n, double p = 0.5) {
    oracle::Word w(n);
    for (auto& s : w) s = rng.uniform() < p ? 1 : 0;
    return w;
}

inline thermo::Grid grid(thermo::CounterRng& rng, const thermo::Box& b, int k, double p_nonzero = 0.5) {
    thermo::Grid g(b);
    for (auto& s : g.cells) s = rng.uniform() < p_nonzero ? static_cast<thermo::Symbol>(1 + rng.below(k - 1)) : 0;
    return g;
}

}  // namespace gen
