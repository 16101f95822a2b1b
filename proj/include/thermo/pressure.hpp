#pragma once

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "thermo/potential.hpp"

namespace thermo {

struct PressurePoint {
    double beta = 0;
    double estimate = 0;
    double lower = 0;
    double upper = 0;
    std::string method;  // transfer-1d | renewal | torus-2d
    std::int64_t R = 0;
    double finite_size_slack = 0;  // torus only; not a rigorous bound
    bool rigorous = true;
    std::string note;
    double width() const { return upper - lower; }
};

struct PressureCurve {
    std::vector<PressurePoint> points;
    nlohmann::json meta;
    std::string to_csv() const;
    static PressureCurve from_csv(const std::string& text);
};

// Geometric grid from 0.05 to 8 with 60 points, plus beta = 0.
std::vector<double> default_beta_grid(double lo = 0.05, double hi = 8.0, int count = 60);

struct TransferOptions {
    double tol = 1e-10;
    std::int64_t max_iter = 2000000;
    double state_guard = 1 << 20;
    bool force_generic = false;  // skip the defect-gap automaton
};

// Weighted graph whose log spectral radius is the pressure of a locally constant potential.
// Built once per potential; evaluate at any beta.
class TransferModel {
public:
    TransferModel(const TruncatedPotential& pot, const TransferOptions& opt = {});
    PressurePoint at(double beta) const;
    std::int64_t states() const { return n_; }
    bool compressed() const { return compressed_; }

private:
    struct Edge {
        std::int32_t to;
        double energy;  // potential sum carried by the edge
    };
    std::int64_t n_ = 0;
    std::vector<std::int64_t> start_;  // CSR offsets
    std::vector<Edge> edges_;
    std::vector<std::vector<std::int32_t>> components_;  // nontrivial strongly connected components
    std::vector<std::int32_t> comp_of_;
    bool compressed_ = false;
    double a_R_ = 0;
    std::int64_t R_ = 0;
    TransferOptions opt_;

    void add_state_edges(std::int64_t s, std::vector<Edge> out);
    void finish();
};

PressurePoint transfer_pressure_1d(const TruncatedPotential& pot, double beta, const TransferOptions& opt = {});

// Root of sum_{n>=1} (|A|-1) exp(beta S_n - nP) = 1 for a one-sided single-fixed-point target,
// S_n = -(a_1 + ... + a_n). Result is max(0, root), certified by tail bounds.
class RenewalModel {
public:
    RenewalModel(const Subshift& x, const FreezingSequence& a, std::int64_t n_max = 1000000);
    PressurePoint at(double beta) const;

private:
    std::vector<double> S_;  // S_[n], n = 0..N
    double mult_ = 1;        // |A| - 1
    std::int64_t N_ = 0;
    const FreezingSequence* a_;
    double harmonic_coef_ = 0;  // c when a_j = c/j beyond the table, else 0
    struct Bounds {
        double lo, hi;
    };
    Bounds F(double beta, double P, double* deriv) const;
};

PressurePoint renewal_pressure(const Subshift& x, const FreezingSequence& a, double beta,
                               std::int64_t n_max = 1000000);

// Exact partition function of the n x n torus, grouped by energy so that any beta is cheap.
class TorusModel {
public:
    TorusModel(const TruncatedPotential& pot, int n, double guard = double(1 << 25));
    double log_z_per_site(double beta) const;
    int side() const { return n_; }

private:
    int n_ = 0;
    std::vector<double> a_;  // a_0..a_R
    std::vector<std::pair<std::vector<int>, double>> classes_;  // exponent histogram -> multiplicity
};

// finite_size_slack is |p_n - p_{n-1}|.
PressurePoint torus_pressure_2d(const TruncatedPotential& pot, double beta, int n);

struct SlantFit {
    double s_hat = 0;
    double h_hat = 0;
    double s_slack = 0;               // tolerance for |s_hat|
    std::vector<double> residuals;    // g(beta_k) = p_k - (s_hat beta_k + h_hat), all points
    std::vector<double> slack;        // bracket width + 2 x fitted-line standard error
    std::size_t tail_start = 0;       // first index used by the fit
    bool monotone = true;             // residuals non-increasing within slack
    bool nonnegative = true;          // residuals >= -slack
};
SlantFit fit_slant(const PressureCurve& curve, double tail_fraction = 0.25);

struct FreezeReport {
    enum class Verdict { FrozenBeyond, NotDetected };
    Verdict verdict = Verdict::NotDetected;
    double beta_c_lo = 0;
    double beta_c_hi = 0;
    bool affine_everywhere = false;
    double max_tail_residual = 0;
    SlantFit fit;
    std::vector<double> betas;
    nlohmann::json to_json() const;
};
FreezeReport detect_freeze(const PressureCurve& curve, double tail_fraction = 0.25);

// Evaluates f at every beta on `workers` threads, results in beta order.
PressureCurve evaluate_curve(const std::vector<double>& betas, const std::function<PressurePoint(double)>& f,
                             int workers = 1);

}  // namespace thermo
