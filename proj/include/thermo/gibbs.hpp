#pragma once

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "thermo/potential.hpp"
#include "thermo/rng.hpp"

namespace thermo {

// Gibbs specification on a box Lambda for the interaction truncated at n_max. The boundary grid
// covers Lambda plus a collar of width 2*n_max; its cells inside Lambda are ignored.
struct FiniteSpecification {
    std::shared_ptr<const Subshift> x;
    InteractionFamily phi;
    Box lambda;
    Grid boundary;
    double beta = 1;

    std::int64_t n_max() const { return phi.n_max(); }
    Box collar_box() const;  // lambda grown by 2*n_max
    // U(config | boundary): sum of Phi over translated centered boxes meeting lambda.
    double energy(const Grid& full) const;
};

struct WeightedPattern {
    Grid pattern;  // on lambda
    double probability = 0;
};

std::vector<WeightedPattern> conditional_weights(const FiniteSpecification& fs, double guard = 1 << 20);
nlohmann::json weights_to_json(const std::vector<WeightedPattern>& w, const Alphabet& names);

// Max |P_Lambda(x' | z) - gamma_{Lambda'}(x' | boundary, z)| over x' on sub and z on lambda \ sub.
double dlr_discrepancy(const FiniteSpecification& fs, const Box& sub);

// rho = |A|^{-1} exp(-2 beta ||Phi||_S) with the strong norm summed through n_max.
double full_support_rho(const InteractionFamily& phi, std::size_t alphabet_size, double beta = 1);
// Smallest weight divided by rho^{|Lambda|}; >= 1 when the lower bound holds.
double rho_bound_margin(const std::vector<WeightedPattern>& w, double rho);

struct TelemetryRow {
    std::uint64_t step = 0;
    double energy = 0;
    double inadmissible_mass = 0;
};

struct ChainState {
    int n = 0;
    int dim = 1;
    std::vector<Symbol> config;  // row-major torus cells
    std::uint64_t seed = 0;
    std::uint64_t steps = 0;
    std::uint64_t accepted = 0;
    std::uint64_t samples = 0;          // steps contributing to the averages (second half)
    double energy = 0;
    double mean_inadmissible_mass = 0;  // average fraction of centers with an inadmissible window
    std::vector<double> symbol_frequency;
    std::vector<TelemetryRow> telemetry;
    std::string rng = CounterRng::kAlgorithm;
    std::string telemetry_csv() const;
};

// Single-site Metropolis chain on the n^d torus for the truncated potential. Incremental energy
// through per-center counts of matching defect placements, bucketed by the radius that sees them.
class MetropolisChain {
public:
    MetropolisChain(const TruncatedPotential& pot, int n, std::uint64_t seed);

    double energy() const { return energy_; }
    double full_energy() const;  // recomputed from scratch
    double delta(std::int64_t site, Symbol s);
    void set(std::int64_t site, Symbol s);
    std::int64_t bad_centers() const { return bad_; }
    std::int64_t sites() const { return static_cast<std::int64_t>(cfg_.size()); }
    const std::vector<Symbol>& config() const { return cfg_; }

private:
    struct Placement {
        std::vector<std::pair<std::int32_t, Symbol>> cells;
        std::vector<std::pair<std::int32_t, std::int8_t>> centers;  // (center, radius)
        std::int32_t satisfied = 0;
    };
    const Subshift& x_;
    std::vector<double> a_;  // a_0..a_R
    int R_ = 0;
    int n_ = 0;
    int dim_ = 1;
    std::vector<Symbol> cfg_;
    std::vector<Placement> place_;
    std::vector<std::vector<std::int32_t>> by_site_;
    std::vector<std::int32_t> cnt_;  // cnt_[c*(R+1) + r]
    std::vector<std::int8_t> expo_;  // R+1 means none
    double energy_ = 0;
    std::int64_t bad_ = 0;

    void toggle(std::int32_t p, int sign);
    int exponent(std::int32_t c) const;
    double center_value(int e) const { return e <= R_ ? -a_[e] : 0.0; }
};

ChainState metropolis_run(const TruncatedPotential& pot, double beta, int n, std::uint64_t steps, std::uint64_t seed,
                          std::uint64_t telemetry_every = 0);

}  // namespace thermo
