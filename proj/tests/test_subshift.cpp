#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "thermo/errors.hpp"

using namespace thermo;

namespace {

Pattern word(const std::string& s) { return Pattern::word(fixtures::bits(s)); }

}  // namespace

TEST_CASE("golden mean admits 0101 and matches the no-11 oracle on all words of length 4") {
    auto x = fixtures::golden();
    CHECK(x->admissible(word("0101")));
    for (const auto& w : oracle::all_words(2, 4)) CHECK(x->admissible(Pattern::word(w)) == !oracle::has_11(w));
}

TEST_CASE("single point rejects any 1") {
    auto x = fixtures::single_point();
    CHECK_FALSE(x->admissible(word("0010")));
    CHECK(x->admissible(word("0000")));
}

TEST_CASE("Thue-Morse admits 11 but not 111") {
    auto x = fixtures::thue_morse();
    CHECK(x->admissible(word("11")));
    CHECK_FALSE(x->admissible(word("111")));
}

TEST_CASE("Thue-Morse admissibility matches factors of a long prefix") {
    auto x = fixtures::thue_morse();
    for (int n = 1; n <= 8; ++n) {
        auto f = oracle::thue_morse_factors(n);
        for (const auto& w : oracle::all_words(2, n)) CHECK(x->admissible(Pattern::word(w)) == (f.count(w) > 0));
    }
}

TEST_CASE("symbol outside the alphabet is an input error") {
    auto x = fixtures::golden();
    CHECK_THROWS_AS(x->admissible(Pattern::word({0, 2})), InputError);
}

TEST_CASE("enumerate_language on ErgBox windows") {
    auto g = enumerate_language(*fixtures::golden(), BoxWindow::erg(1, 2));
    REQUIRE(g.size() == 3);
    CHECK(g[0] == word("00"));
    CHECK(g[1] == word("01"));
    CHECK(g[2] == word("10"));

    auto sub = fixtures::make(R"({"alphabet":["0","1"],"dimension":1,"kind":{"type":"full","sub_alphabet":["0"]}})");
    auto s = enumerate_language(*sub, BoxWindow::erg(1, 3));
    REQUIRE(s.size() == 1);
    CHECK(s[0] == word("000"));

    auto tm = enumerate_language(*fixtures::thue_morse(), BoxWindow::erg(1, 3));
    CHECK(tm.size() == 6);
    for (const auto& p : tm) {
        CHECK(p != word("000"));
        CHECK(p != word("111"));
    }
}

TEST_CASE("enumerate_language output is canonically sorted") {
    auto l = enumerate_language(*fixtures::golden(), BoxWindow::erg(1, 6));
    CHECK(l.size() == 21);
    for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i - 1].canonical_less(l[i]));
}

TEST_CASE("enumeration guard raises a resource error") {
    EnumerationGuard guard;
    guard.max_candidates = 16;
    guard.max_patterns = 4;
    CHECK_THROWS_AS(enumerate_language(*fixtures::full(2), BoxWindow::erg(1, 8), guard), ResourceError);
}

TEST_CASE("substitution_expand") {
    auto tm = fixtures::thue_morse();
    CHECK(substitution_expand(*tm, 0, 3) == word("01101001"));
    CHECK(substitution_expand(*tm, 1, 0) == word("1"));
    CHECK_THROWS_AS(substitution_expand(*fixtures::golden(), 0, 1), InputError);

    auto two = fixtures::make(R"({"alphabet":["a","b"],"dimension":2,"kind":{"type":"substitution","box":[2,2],
        "rules":{"a":[["a","b"],["b","b"]],"b":[["b","b"],["b","a"]]}}})");
    Grid g = substitution_expand(*two, 0, 2).to_grid();
    REQUIRE(g.box.size[0] == 4);
    // Row-major rows of the composed image: a-block | b-block over b-block | b-block.
    std::vector<Symbol> expect = {0, 1, 1, 1,  //
                                  1, 1, 1, 0,  //
                                  1, 1, 1, 1,  //
                                  1, 0, 1, 0};
    CHECK(g.cells == expect);
}

TEST_CASE("generate_configuration returns admissible patterns") {
    auto sp = fixtures::single_point();
    auto p = generate_configuration(*sp, BoxWindow::erg(1, 9), 5);
    for (auto s : p.symbols()) CHECK(s == 0);

    auto g = fixtures::golden();
    auto a = generate_configuration(*g, BoxWindow::erg(1, 8), 1);
    auto b = generate_configuration(*g, BoxWindow::erg(1, 8), 2);
    CHECK_FALSE(oracle::has_11(a.symbols()));
    CHECK_FALSE(oracle::has_11(b.symbols()));
    CHECK(a == generate_configuration(*g, BoxWindow::erg(1, 8), 1));

    auto hs = fixtures::hard_squares();
    Grid h = generate_configuration(*hs, BoxWindow::erg(2, 4), 3).to_grid();
    for (std::int64_t r = 0; r < 4; ++r)
        for (std::int64_t c = 0; c < 4; ++c) {
            if (!h.at(Point::of({r, c}))) continue;
            if (r + 1 < 4) CHECK(h.at(Point::of({r + 1, c})) == 0);
            if (c + 1 < 4) CHECK(h.at(Point::of({r, c + 1})) == 0);
        }
}

TEST_CASE("empty SFTs are rejected") {
    // 1D: detected when the block graph has no cycle.
    CHECK_THROWS_AS(fixtures::make(R"({"alphabet":["0","1"],"dimension":1,"kind":{"type":"sft","forbidden":[
        {"offsets":[0],"cells":["0"]},{"offsets":[0],"cells":["1"]}]}})"),
                    InputError);
    // 2D: the backtracking fill exhausts.
    auto x = fixtures::make(R"({"alphabet":["0","1"],"dimension":2,"kind":{"type":"sft","forbidden":[
        {"offsets":[[0,0]],"cells":["0"]},{"offsets":[[0,0]],"cells":["1"]}]}})");
    CHECK_THROWS_AS(generate_configuration(*x, BoxWindow::erg(2, 2), 1), EmptyWindowError);
}

TEST_CASE("spec JSON round-trips through the canonical emitter") {
    for (auto x : {fixtures::golden(true), fixtures::hard_squares(), fixtures::thue_morse(), fixtures::single_point()}) {
        std::string t = canonical_spec_text(x->spec());
        CHECK(canonical_spec_text(spec_from_json(nlohmann::json::parse(t))) == t);
    }
}

TEST_CASE("malformed specs are input errors") {
    CHECK_THROWS_AS(fixtures::make(R"({"alphabet":["0"],"dimension":1,"kind":{"type":"nope"}})"), InputError);
    CHECK_THROWS_AS(fixtures::make(R"({"alphabet":["0","1"],"dimension":1,"kind":{"type":"substitution","box":[2],
        "rules":{"0":["0","1"]}}})"),
                    InputError);
    CHECK_THROWS_AS(fixtures::make(R"({"alphabet":["0","1"],"dimension":1,"kind":{"type":"single_point","symbol":"7"}})"),
                    InputError);
}

TEST_CASE("property: golden admissibility equals the no-11 oracle on random words") {
    CounterRng rng(11, 1);
    for (int t = 0; t < 300; ++t) {
        auto w = gen::word(rng, 1 + rng.below(20), 0.3);
        CHECK(fixtures::golden()->admissible(Pattern::word(w)) == !oracle::has_11(w));
    }
}

TEST_CASE("property: admissibility is inherited by sub-patterns") {
    CounterRng rng(12, 1);
    auto tm = fixtures::thue_morse();
    auto t = oracle::thue_morse_prefix(10);
    for (int c = 0; c < 200; ++c) {
        std::size_t n = 2 + rng.below(12), at = rng.below(t.size() - n);
        oracle::Word w(t.begin() + at, t.begin() + at + n);
        REQUIRE(tm->admissible(Pattern::word(w)));
        std::size_t a = rng.below(n), b = a + 1 + rng.below(n - a);
        CHECK(tm->admissible(Pattern::word(oracle::Word(w.begin() + a, w.begin() + b))));
    }
}
