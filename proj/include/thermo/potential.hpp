#pragma once

#include <memory>
#include <string>
#include <vector>

#include "thermo/sequence.hpp"
#include "thermo/subshift.hpp"

namespace thermo {

// Exact(j): the radius-(j-1) window is admissible and the radius-j window is not.
// One-sided: j is the length of the shortest inadmissible prefix (j >= 1).
// AtLeast(R+1): everything inspected was admissible.
struct DistanceExponent {
    bool exact = false;
    std::int64_t j = 0;

    static DistanceExponent Exact(std::int64_t j) { return {true, j}; }
    static DistanceExponent AtLeast(std::int64_t j) { return {false, j}; }
    bool operator==(const DistanceExponent&) const = default;
    std::string str() const;
};

// Window around `center` inside g: cube of radius R (two-sided) or cells center..center+R-1 (one-sided).
DistanceExponent exponent_in_grid(const Subshift& x, const Grid& g, const Point& center, std::int64_t R);
// Window is a Pattern on StatBox(R) (two-sided) or on the prefix [0, R-1] (one-sided).
DistanceExponent distance_exponent(const Subshift& x, const Pattern& window);

class TruncatedPotential {
public:
    TruncatedPotential(std::shared_ptr<const Subshift> x, FreezingSequence seq, std::int64_t R);

    const Subshift& subshift() const { return *x_; }
    const FreezingSequence& sequence() const { return seq_; }
    std::int64_t radius() const { return R_; }
    // Sup-norm distance to the untruncated potential.
    double error_bound() const { return seq_(R_); }
    Box window_box() const;

    double value(const DistanceExponent& e) const { return e.exact ? -seq_(e.j) : 0.0; }
    double eval(const Pattern& window) const;
    double eval_at(const Grid& g, const Point& center) const { return value(exponent_in_grid(*x_, g, center, R_)); }

private:
    std::shared_ptr<const Subshift> x_;
    FreezingSequence seq_;
    std::int64_t R_;
};

// Phi on the centered box of radius n: a_{n+1} - a_n on inadmissible patterns, 0 otherwise.
struct InteractionFamily {
    int dim = 1;
    std::vector<double> phi;            // phi[n] = a_{n+1} - a_n, n = 0..n_max
    std::vector<double> strong_sum;     // sum_{m<=n} (2m+1)^d |phi[m]|
    std::vector<double> weak_sum;       // sum_{m<=n} |phi[m]|
    std::int64_t n_max() const { return static_cast<std::int64_t>(phi.size()) - 1; }
    double value(const Subshift& x, const Pattern& p) const;  // p on StatBox(n)
    std::string to_csv() const;
};
InteractionFamily generate_interaction(const FreezingSequence& a, const Subshift& x, std::int64_t n_max);

enum class NogoVerdict { NoGo, CandidateFreezing, Inconclusive };
std::string to_string(NogoVerdict v);

struct NogoReport {
    NogoVerdict verdict = NogoVerdict::Inconclusive;
    std::string reason;
    std::vector<std::pair<std::int64_t, double>> trace;  // (N, sum_{n<=N} n^{d-1} a_n)
    nlohmann::json to_json() const;
};
NogoReport nogo_classify(const FreezingSequence& a, int d);

// Sum over shifts j in S of phi_R(shift_j x') - phi_R(shift_j x), where x' is x with W replaced by W'
// at `anchor`. x must contain W there, and every window around S must lie inside x.
double replacement_gain(const TruncatedPotential& pot, const Grid& x, const Grid& W, const Grid& W2,
                        const Point& anchor, const Box& S);

}  // namespace thermo
