#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thermo/subshift.hpp"

namespace thermo {

using BigInt = boost::multiprecision::cpp_int;

double log_big(const BigInt& x);

enum class CountMethod { Brute, Transfer1d, RowTransfer2d, Substitution };
std::string to_string(CountMethod m);

struct CountOptions {
    int row_width_cap = 22;
    double brute_guard = 1 << 24;
};

struct ComplexityEntry {
    std::int64_t n = 0;
    BigInt count;
    CountMethod method = CountMethod::Brute;
    // False when the count is of locally admissible blocks whose extendability was not verified.
    bool exact_language = true;
};

struct ComplexityTable {
    std::map<std::int64_t, ComplexityEntry> entries;
    const BigInt& count(std::int64_t n) const;
    std::string to_csv() const;
};

ComplexityEntry count_entry(const Subshift& x, std::int64_t n, const CountOptions& opt = {});
BigInt count_blocks(const Subshift& x, std::int64_t n, const CountOptions& opt = {});
ComplexityTable complexity_table(const Subshift& x, const std::vector<std::int64_t>& ns,
                                 const CountOptions& opt = {});

struct EntropyEstimate {
    double upper = 0;
    double lower = 0;
    std::optional<double> exact;
    std::string provenance;  // perron-1d | zero-substitution | closed-form | user-supplied | none
};

// Spectral radius of the essential block graph (exact topological entropy of a 1D block description).
double perron_entropy_1d(const BlockGraph& g);
EntropyEstimate entropy_bounds(const Subshift& x, std::int64_t n_max, const CountOptions& opt = {});

// Entropy value used as h_ref in the sequence formulas.
struct HRef {
    enum class Source { Exact, UpperBound, User };
    double value = 0;
    Source source = Source::Exact;
    bool conditional() const { return source == Source::UpperBound; }
    std::string describe() const;
};
HRef reference_entropy(const EntropyEstimate& e);

struct KappaSequence {
    std::vector<double> kappa;   // kappa[i], i = 0..i_max
    std::vector<BigInt> counts;  // counts of 2^i boxes
    HRef h_ref;
    int dim = 1;
};

KappaSequence kappa_sequence(const Subshift& x, int i_max, const HRef& h_ref, const CountOptions& opt = {});

struct ComplexityBound {
    double Q = 0;
    double C = 0;
};
ComplexityBound substitution_complexity_bound(const Subshift& x);

}  // namespace thermo
