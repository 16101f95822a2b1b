#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "thermo/complexity.hpp"
#include "thermo/errors.hpp"
#include "thermo/potential.hpp"
#include "thermo/sequence.hpp"

using namespace thermo;

namespace {

FreezingSequence thm34_for(const Subshift& x, int i_max = 10) {
    return build_thm34_sequence(kappa_source(x, i_max, reference_entropy(entropy_bounds(x, 8))), i_max);
}

Pattern window_1d(const oracle::Word& w) {
    std::int64_t R = static_cast<std::int64_t>(w.size() / 2);
    return Pattern::word(w, -R);
}

}  // namespace

TEST_CASE("thm34 sequence for the single point") {
    auto a = thm34_for(*fixtures::single_point());
    CHECK(a(2) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(a(3) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(a(4) == doctest::Approx(1.5).epsilon(1e-12));
    for (int j = 5; j <= 8; ++j) CHECK(a(j) == doctest::Approx((2 * std::log(2.0) + 3) / 4).epsilon(1e-12));
    CHECK(a(5) == doctest::Approx(1.09657).epsilon(1e-5));
    CHECK(a.range_at(6) == 2);
}

TEST_CASE("thm34 sequence for the golden mean") {
    auto a = thm34_for(*fixtures::golden());
    CHECK(a(2) == doctest::Approx(0.211935 + 3).epsilon(1e-6));
    CHECK(a(2) == doctest::Approx(3.21193).epsilon(1e-5));
    CHECK_FALSE(a.conditional);
}

TEST_CASE("thm34 sequence on a conditional entropy is flagged") {
    CHECK(thm34_for(*fixtures::hard_squares(), 3).conditional);
}

TEST_CASE("thm51 sequence") {
    auto a = build_thm51_sequence(0.5);
    CHECK(a(10) == doctest::Approx(0.5).epsilon(1e-15));
    for (int j = 1; j <= 500; j += 7) CHECK(a(j) * j == doctest::Approx(2 * (0.5 + 2)).epsilon(1e-12));
    CHECK(thm51_constant(*fixtures::golden(), 64, 0.4812118250596034) > 0);
}

TEST_CASE("thm52 sequence") {
    KappaSequence zero;
    zero.kappa.assign(8, 0.0);
    zero.h_ref = HRef{0, HRef::Source::Exact};
    auto a = build_thm52_sequence(zero, 64);
    for (int j = 2; j <= 64; ++j) CHECK(a(3 * j) == doctest::Approx((2 * std::log(double(j)) + 1) / j).epsilon(1e-12));

    auto tm = fixtures::thue_morse();
    auto k = kappa_sequence(*tm, 6, HRef{0, HRef::Source::Exact});
    auto b = build_thm52_sequence(k, 64);
    const auto& q = k.kappa;
    double expect = 2 * std::log(8.0) / 8 + (q[0] + 2 * q[1] + 4 * q[2] + 8 * q[3]) / 8 + 1.0 / 8;
    CHECK(b(24) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(b(3 * 64) < b(24));
    CHECK(b(3 * 64) < b(3 * 32));
    CHECK(b(3 * 32) < b(3 * 16));
    CHECK_THROWS_AS(b(3 * 64 + 1), InputError);
}

TEST_CASE("cor53 sequence") {
    auto a = build_cor53_sequence();
    CHECK(a(8) == doctest::Approx(std::pow(std::log(8.0), 2) / 8).epsilon(1e-14));
    CHECK(a(8) == doctest::Approx(0.540510).epsilon(1e-6));
    for (int j = 8; j <= 5000; j += 13) CHECK(a(j) * j / std::pow(std::log(double(j)), 2) == doctest::Approx(1.0));
    CHECK(a.tail_class.label == "O(log^2 j/j)");
    CHECK(nogo_classify(a, 1).verdict == NogoVerdict::CandidateFreezing);
}

TEST_CASE("custom sequences") {
    CHECK_THROWS_AS(custom_sequence({1, 2}), InputError);
    CHECK_THROWS_AS(custom_sequence({1, -1}), InputError);
    auto e = sequence_from_expression("1/n^2", 1);
    CHECK(e(4) == doctest::Approx(1.0 / 16));
    CHECK(e.tail_class.power == 2);
    CHECK_THROWS_AS(sequence_from_expression("n^2", 1), InputError);
}

TEST_CASE("distance exponents") {
    auto sp = fixtures::single_point();
    oracle::Word w(17, 0);
    w[8 + 5] = 1;
    CHECK(distance_exponent(*sp, window_1d(w)) == DistanceExponent::Exact(5));
    CHECK(distance_exponent(*sp, window_1d(oracle::Word(17, 0))) == DistanceExponent::AtLeast(9));

    auto g = fixtures::golden();
    oracle::Word v(7, 0);
    v[3] = v[4] = 1;
    CHECK(distance_exponent(*g, window_1d(v)) == DistanceExponent::Exact(1));

    auto one = fixtures::single_point(true);
    CHECK(distance_exponent(*one, Pattern::word(fixtures::bits("0010"))) == DistanceExponent::Exact(3));
}

TEST_CASE("truncated potential values") {
    auto sp = fixtures::single_point();
    auto a = thm34_for(*sp);
    TruncatedPotential pot(sp, a, 8);
    CHECK(pot.value(DistanceExponent::AtLeast(9)) == 0);
    CHECK(pot.value(DistanceExponent::Exact(0)) == -a(0));
    CHECK(pot.value(DistanceExponent::Exact(3)) == doctest::Approx(-1.5));
    CHECK(pot.error_bound() == a(8));
    CHECK_THROWS_AS(pot.eval(Pattern::word(oracle::Word(5, 0), -2)), InputError);
}

TEST_CASE("interaction family") {
    auto sp = fixtures::single_point();
    auto a = thm34_for(*sp);
    auto phi = generate_interaction(a, *sp, 10000);
    for (double v : phi.phi) CHECK(v <= 0);
    CHECK(phi.phi[2] == doctest::Approx(-1.5));
    oracle::Word w(5, 0);
    w[0] = 1;
    CHECK(phi.value(*sp, Pattern::word(w, -2)) == doctest::Approx(-1.5));
    CHECK(phi.value(*sp, Pattern::word(oracle::Word(5, 0), -2)) == 0);
    CHECK(phi.weak_sum.back() <= a(0) + 1e-12);
    CHECK(phi.strong_sum.back() > 10 * phi.weak_sum.back());
}

TEST_CASE("nogo classification") {
    CHECK(nogo_classify(sequence_from_expression("1/n^2", 1), 1).verdict == NogoVerdict::NoGo);
    CHECK(nogo_classify(sequence_from_expression("1/n^3", 2), 2).verdict == NogoVerdict::NoGo);
    CHECK(nogo_classify(sequence_from_expression("log^2(n)/n", 1), 1).verdict == NogoVerdict::CandidateFreezing);
    CHECK(nogo_classify(sequence_from_expression("1/n^2", 2), 2).verdict == NogoVerdict::CandidateFreezing);
    std::vector<double> v;
    for (int j = 0; j <= 2000; ++j) v.push_back(1.0 / (1 + j));
    auto r = nogo_classify(custom_sequence(v), 1);
    CHECK(r.verdict == NogoVerdict::Inconclusive);
    CHECK(r.trace.size() == 2);
}

TEST_CASE("replacement gain") {
    auto sp = fixtures::single_point();
    auto a = thm34_for(*sp);
    const std::int64_t R = 4;
    TruncatedPotential pot(sp, a, R);
    oracle::Word w(41, 0);
    w[20] = 1;
    Grid x = fixtures::word_grid(w, -20);
    Grid W = fixtures::word_grid({1}), W2 = fixtures::word_grid({0});
    Box S = Box::cube(1, -R, 2 * R + 1);
    double removed = 0;
    for (std::int64_t j = -R; j <= R; ++j) removed += a(std::abs(j));
    CHECK(replacement_gain(pot, x, W, W2, Point::of({0}), S) == doctest::Approx(removed));
    CHECK(replacement_gain(pot, x, W, W, Point::of({0}), S) == 0);

    Grid y = fixtures::word_grid(oracle::Word(41, 0), -20);
    CHECK(replacement_gain(pot, y, W2, W, Point::of({0}), S) ==
          doctest::Approx(-replacement_gain(pot, x, W, W2, Point::of({0}), S)));
    CHECK_THROWS_AS(replacement_gain(pot, y, W, W2, Point::of({0}), S), InputError);
}

TEST_CASE("property: distance exponent equals the brute-force radius scan") {
    CounterRng rng(21, 1);
    auto sp = fixtures::single_point();
    auto g = fixtures::golden();
    for (int t = 0; t < 400; ++t) {
        int R = 1 + static_cast<int>(rng.below(8));
        auto w = gen::word(rng, 2 * R + 1, t % 2 ? 0.05 : 0.3);
        int e_sp = oracle::exponent_1d(w, R, R, oracle::interval_has_one);
        int e_g = oracle::exponent_1d(w, R, R, oracle::interval_has_11);
        auto d_sp = distance_exponent(*sp, window_1d(w));
        auto d_g = distance_exponent(*g, window_1d(w));
        CHECK(d_sp == (e_sp <= R ? DistanceExponent::Exact(e_sp) : DistanceExponent::AtLeast(R + 1)));
        CHECK(d_g == (e_g <= R ? DistanceExponent::Exact(e_g) : DistanceExponent::AtLeast(R + 1)));
    }
}

TEST_CASE("property: built sequences are positive and non-increasing") {
    std::vector<FreezingSequence> seqs = {thm34_for(*fixtures::golden()), thm34_for(*fixtures::single_point()),
                                          thm34_for(*fixtures::thue_morse(), 6), build_thm51_sequence(1.3),
                                          build_cor53_sequence(),
                                          build_thm52_sequence(kappa_sequence(*fixtures::thue_morse(), 6,
                                                                              HRef{0, HRef::Source::Exact}),
                                                               64)};
    for (const auto& a : seqs)
        for (int j = 1; j <= 150; ++j) {
            CHECK(a(j) > 0);
            CHECK(a(j) <= a(j - 1));
        }
}

TEST_CASE("property: truncated potential stays within a_R of the finer truncation") {
    CounterRng rng(22, 1);
    auto g = fixtures::golden();
    auto a = thm34_for(*g);
    TruncatedPotential coarse(g, a, 3), fine(g, a, 9);
    for (int t = 0; t < 300; ++t) {
        auto w = gen::word(rng, 41, 0.2);
        Grid x = fixtures::word_grid(w, -20);
        double c = coarse.eval_at(x, Point::of({0})), f = fine.eval_at(x, Point::of({0}));
        CHECK(f <= c + 1e-15);
        CHECK(c <= f + a(3) + 1e-15);
    }
}
