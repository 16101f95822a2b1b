#pragma once

#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "thermo/complexity.hpp"

namespace thermo {

enum class Recipe { Thm34, Thm51, Thm52, Cor53, Custom };
std::string to_string(Recipe r);

// Growth class of a_j used by the summability test: a_j ~ log^log_pow(j) (loglog j)^loglog_pow / j^power.
struct AsymptoticClass {
    std::string label = "custom";
    double power = 0;
    int log_pow = 0;
    int loglog_pow = 0;
    bool symbolic = false;  // false: numeric-only, no analytic verdict
};

// a_j = coef * log(j)^log_pow / j^power for j >= peak, constant a_peak below.
struct PowerLaw {
    double coef = 1;
    int log_pow = 0;
    double power = 1;
    std::int64_t peak = 1;
    double operator()(std::int64_t j) const;
};

class FreezingSequence {
public:
    Recipe recipe = Recipe::Custom;
    nlohmann::json params;  // recipe metadata
    AsymptoticClass tail_class;
    std::vector<double> table;        // a_0 .. a_J
    std::vector<int> range;           // dyadic range index i for dyadic-kappa entries, -1 otherwise
    std::vector<std::uint8_t> extrapolated;
    bool repaired = false;            // running-maximum monotone repair was applied
    bool conditional = false;         // built from an entropy upper bound
    std::optional<PowerLaw> power_law;
    std::function<double(std::int64_t)> tail;  // values beyond the table; may throw InputError

    double operator()(std::int64_t j) const { return value(j); }
    double value(std::int64_t j) const;
    std::int64_t tabulated() const { return static_cast<std::int64_t>(table.size()) - 1; }
    bool extrapolated_at(std::int64_t j) const;
    int range_at(std::int64_t j) const;

    std::string to_csv(std::int64_t j_max) const;
    nlohmann::json to_json(std::int64_t j_max) const;
};

// kappa_i as a function of i: exact-rational up to i_max, floating extension for 1D block graphs,
// otherwise the last tabulated value (flagged extrapolated).
struct KappaSource {
    KappaSequence table;
    std::function<double(int)> beyond;  // empty: extrapolate with the last kappa
    double at(int i, bool* extrapolated = nullptr) const;
};
KappaSource kappa_source(const Subshift& x, int i_max, const HRef& h_ref, const CountOptions& opt = {});

// log(count of length-n words)/n - log(rho) for a block graph, computed without cancellation.
double block_graph_kappa(const BlockGraph& g, std::int64_t n);

FreezingSequence build_thm34_sequence(const KappaSource& kappa, int i_max);
FreezingSequence build_thm51_sequence(double c, std::int64_t table_size = 64);
FreezingSequence build_thm52_sequence(const KappaSequence& kappa, std::int64_t j_max);
FreezingSequence build_cor53_sequence(std::int64_t table_size = 64);
FreezingSequence power_sequence(const PowerLaw& law, const AsymptoticClass& cls, std::int64_t table_size = 64);
FreezingSequence custom_sequence(std::vector<double> values);
// Parses "1/n^2", "c/n", "log^2(n)/n", "3*log(n)/n^2", "loglog(n)/n^2" and similar.
FreezingSequence sequence_from_expression(const std::string& expr, int d);

// c = max_j (log n_j - j h) over tabulated 1D counts.
double thm51_constant(const Subshift& x, std::int64_t j_max, double h);

}  // namespace thermo
