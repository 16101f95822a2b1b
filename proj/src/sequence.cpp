#include "thermo/sequence.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iomanip>
#include <regex>
#include <sstream>

#include "thermo/errors.hpp"
#include "thermo/format.hpp"

namespace thermo {

std::string to_string(Recipe r) {
    switch (r) {
        case Recipe::Thm34: return "thm34";
        case Recipe::Thm51: return "thm51";
        case Recipe::Thm52: return "thm52";
        case Recipe::Cor53: return "cor53";
        case Recipe::Custom: return "custom";
    }
    return "?";
}

double PowerLaw::operator()(std::int64_t j) const {
    double x = static_cast<double>(std::max(j, peak));
    return coef * std::pow(std::log(x), log_pow) / std::pow(x, power);
}

double FreezingSequence::value(std::int64_t j) const {
    if (j < 0) throw InputError("sequence index must be non-negative");
    if (j <= tabulated()) return table[j];
    if (!tail) throw InputError("sequence undefined beyond index " + std::to_string(tabulated()));
    return tail(j);
}

bool FreezingSequence::extrapolated_at(std::int64_t j) const {
    if (j <= tabulated()) return extrapolated[j];
    return recipe == Recipe::Thm34 && params.value("tail_extrapolated", false);
}

int FreezingSequence::range_at(std::int64_t j) const {
    if (j <= tabulated()) return range[j];
    if (recipe != Recipe::Thm34) return -1;
    int i = 0;
    while ((std::int64_t(2) << i) < j) ++i;
    return i;
}

std::string FreezingSequence::to_csv(std::int64_t j_max) const {
    std::ostringstream os;
    os << "j,a_j,range_i,extrapolated\n";
    for (std::int64_t j = 0; j <= j_max; ++j)
        os << j << "," << fmt_num(value(j)) << "," << range_at(j) << "," << (extrapolated_at(j) ? 1 : 0) << "\n";
    return os.str();
}

nlohmann::json FreezingSequence::to_json(std::int64_t j_max) const {
    nlohmann::json j;
    j["recipe"] = to_string(recipe);
    j["params"] = params;
    j["asymptotic_class"] = tail_class.label;
    j["repaired"] = repaired;
    j["conditional"] = conditional;
    nlohmann::json vals = nlohmann::json::array();
    for (std::int64_t k = 0; k <= j_max; ++k) vals.push_back(value(k));
    j["values"] = vals;
    return j;
}

double KappaSource::at(int i, bool* extrapolated) const {
    if (extrapolated) *extrapolated = false;
    if (i < static_cast<int>(table.kappa.size())) return table.kappa[i];
    if (beyond) return beyond(i);
    if (extrapolated) *extrapolated = true;
    return table.kappa.back();
}

double block_graph_kappa(const BlockGraph& g, std::int64_t n) {
    const double h = perron_entropy_1d(g);
    const int M = g.memory;
    if (n <= M + 64) return log_big([&] {
                                BigInt c = 0;
                                if (n <= M) {
                                    for (auto ok : g.admissible_short[n]) c += ok;
                                    return c;
                                }
                                const std::int64_t nv = g.pow_k(M);
                                std::vector<BigInt> v(nv), w(nv);
                                for (std::int64_t i = 0; i < nv; ++i) v[i] = g.vertex[i] ? 1 : 0;
                                for (std::int64_t s = 0; s < n - M; ++s) {
                                    for (auto& z : w) z = 0;
                                    for (std::int64_t e = 0; e < nv * g.k; ++e)
                                        if (g.edge[e]) w[e / g.k] += v[e % nv];
                                    std::swap(v, w);
                                }
                                for (auto& z : v) c += z;
                                return c;
                            }()) / double(n) -
                            h;
    const std::int64_t nv = g.pow_k(M);
    const double rho = std::exp(h);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nv, nv);
    for (std::int64_t e = 0; e < nv * g.k; ++e)
        if (g.edge[e]) B(e / g.k, e % nv) += 1.0 / rho;
    Eigen::VectorXd ones(nv);
    for (std::int64_t i = 0; i < nv; ++i) ones[i] = g.vertex[i] ? 1.0 : 0.0;
    // ones^T B^m ones by binary powering; each factor carries its own log scale.
    std::int64_t m = n - M;
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(nv, nv), base = B;
    double log_scale = 0, base_scale = 0;
    while (m > 0) {
        if (m & 1) {
            result = result * base;
            double s = result.cwiseAbs().maxCoeff();
            result /= s;
            log_scale += base_scale + std::log(s);
        }
        m >>= 1;
        if (m) {
            base = base * base;
            double s = base.cwiseAbs().maxCoeff();
            base /= s;
            base_scale = 2 * base_scale + std::log(s);
        }
    }
    double val = ones.dot(result * ones);
    return (std::log(val) + log_scale - M * h) / double(n);
}

KappaSource kappa_source(const Subshift& x, int i_max, const HRef& h_ref, const CountOptions& opt) {
    KappaSource src;
    src.table = kappa_sequence(x, i_max, h_ref, opt);
    if (const BlockGraph* g = x.block_graph(); g && h_ref.source == HRef::Source::Exact) {
        const BlockGraph graph = *g;
        src.beyond = [graph](int i) {
            if (i > 60) return 0.0;
            return std::max(0.0, block_graph_kappa(graph, std::int64_t(1) << i));
        };
    }
    return src;
}

namespace {

void repair_monotone(FreezingSequence& s) {
    double run = s.tail ? s.tail(s.tabulated() + 1) : 0.0;
    for (std::int64_t j = s.tabulated(); j >= 0; --j) {
        if (s.table[j] < run) {
            s.table[j] = run;
            s.repaired = true;
        }
        run = s.table[j];
    }
}

double thm34_value(double kappa, int i, int d) {
    double logp = i > 1 ? std::log(double(i)) : 0.0;
    return kappa + (2.0 * logp + 3.0) / std::pow(2.0, double(i) * d);
}

}  // namespace

FreezingSequence build_thm34_sequence(const KappaSource& kappa, int i_max) {
    const int d = kappa.table.dim;
    if (i_max < 0) throw InputError("i_max must be non-negative");
    FreezingSequence s;
    s.recipe = Recipe::Thm34;
    s.conditional = kappa.table.h_ref.conditional();
    s.params = {{"h_ref", kappa.table.h_ref.value},
                {"h_ref_source", kappa.table.h_ref.describe()},
                {"i_max", i_max},
                {"d", d},
                {"tail_extrapolated", !kappa.beyond}};
    s.tail_class = {"O(loglog j/j^d)", double(d), 0, 1, true};
    const std::int64_t J = std::int64_t(2) << i_max;
    s.table.resize(J + 1);
    s.range.resize(J + 1);
    s.extrapolated.resize(J + 1);
    for (std::int64_t j = 0; j <= J; ++j) {
        int i = 0;
        while ((std::int64_t(2) << i) < j) ++i;
        bool ext = false;
        double k = kappa.at(i, &ext);
        s.table[j] = thm34_value(k, i, d);
        s.range[j] = i;
        s.extrapolated[j] = ext;
    }
    const KappaSource src = kappa;
    s.tail = [src, d](std::int64_t j) {
        int i = 0;
        while ((std::int64_t(2) << i) < j) ++i;
        return thm34_value(src.at(i), i, d);
    };
    repair_monotone(s);
    return s;
}

FreezingSequence power_sequence(const PowerLaw& law_in, const AsymptoticClass& cls, std::int64_t table_size) {
    PowerLaw law = law_in;
    if (law.coef <= 0 || law.power <= 0) throw InputError("power-law sequence needs positive coefficient and power");
    // Plateau up to the integer maximizing log^k(j)/j^p.
    law.peak = 1;
    if (law.log_pow > 0) {
        double xs = std::exp(double(law.log_pow) / law.power);
        std::int64_t lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(xs)));
        PowerLaw probe = law;
        probe.peak = 1;
        law.peak = probe(lo) >= probe(lo + 1) ? lo : lo + 1;
    }
    FreezingSequence s;
    s.tail_class = cls;
    s.power_law = law;
    s.table.resize(table_size + 1);
    s.range.assign(table_size + 1, -1);
    s.extrapolated.assign(table_size + 1, 0);
    for (std::int64_t j = 0; j <= table_size; ++j) s.table[j] = law(j);
    s.tail = [law](std::int64_t j) { return law(j); };
    s.params = {{"coef", law.coef}, {"log_pow", law.log_pow}, {"power", law.power}, {"plateau_until", law.peak}};
    return s;
}

FreezingSequence build_thm51_sequence(double c, std::int64_t table_size) {
    if (!(c > 0)) throw InputError("c/j recipe constant c must be positive");
    auto s = power_sequence({2.0 * (c + 2.0), 0, 1.0, 1}, {"c/j", 1.0, 0, 0, true}, table_size);
    s.recipe = Recipe::Thm51;
    s.params["c"] = c;
    return s;
}

FreezingSequence build_cor53_sequence(std::int64_t table_size) {
    auto s = power_sequence({1.0, 2, 1.0, 1}, {"O(log^2 j/j)", 1.0, 2, 0, true}, table_size);
    s.recipe = Recipe::Cor53;
    return s;
}

FreezingSequence build_thm52_sequence(const KappaSequence& kappa, std::int64_t j_max) {
    if (j_max < 1) throw InputError("j_max must be >= 1");
    int need = 0;
    while ((std::int64_t(2) << need) <= j_max) ++need;
    if (static_cast<int>(kappa.kappa.size()) <= need)
        throw InputError("kappa sequence too short: need kappa_" + std::to_string(need) + " for j_max = " +
                         std::to_string(j_max));
    std::vector<double> b(j_max + 1, 0.0);
    for (std::int64_t j = 1; j <= j_max; ++j) {
        int top = 0;
        while ((std::int64_t(2) << top) <= j) ++top;
        double sum = 0;
        for (int i = 0; i <= top; ++i) sum += std::ldexp(kappa.kappa[i], i);
        double jd = double(j);
        b[j] = 2.0 * std::log(jd) / jd + sum / jd + 1.0 / jd;
    }
    FreezingSequence s;
    s.recipe = Recipe::Thm52;
    s.conditional = kappa.h_ref.conditional();
    s.params = {{"j_max", j_max}, {"h_ref", kappa.h_ref.value}, {"h_ref_source", kappa.h_ref.describe()}};
    s.tail_class = {"O(log j/j^d)", 1.0, 1, 0, true};
    const std::int64_t J = 3 * j_max;
    s.table.resize(J + 1);
    s.range.assign(J + 1, -1);
    s.extrapolated.assign(J + 1, 0);
    for (std::int64_t m = 0; m <= J; ++m) s.table[m] = b[std::max<std::int64_t>(1, (m + 2) / 3)];
    repair_monotone(s);
    return s;
}

FreezingSequence custom_sequence(std::vector<double> values) {
    if (values.empty()) throw InputError("custom sequence is empty");
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!(values[j] > 0)) throw InputError("custom sequence values must be positive");
        if (j && values[j] > values[j - 1]) throw InputError("custom sequence must be non-increasing");
    }
    FreezingSequence s;
    s.table = std::move(values);
    s.range.assign(s.table.size(), -1);
    s.extrapolated.assign(s.table.size(), 0);
    s.tail_class = {"custom", 0, 0, 0, false};
    return s;
}

FreezingSequence sequence_from_expression(const std::string& expr_in, int d) {
    std::string e;
    for (char c : expr_in)
        if (!std::isspace(static_cast<unsigned char>(c))) e += c;
    // [coef*][loglog(n)|log^k(n)|log(n)|1]/n[^p]
    static const std::regex re(
        R"(^(?:([0-9]*\.?[0-9]+)\*?)?(loglog\(?n\)?|log(?:\^([0-9]+))?\(?n\)?|1)?/n(?:\^([0-9]*\.?[0-9]+))?$)");
    std::smatch m;
    if (!std::regex_match(e, m, re)) throw InputError("cannot parse sequence expression '" + expr_in + "'");
    double coef = m[1].matched ? std::stod(m[1].str()) : 1.0;
    std::string num = m[2].matched ? m[2].str() : "1";
    double p = m[4].matched ? std::stod(m[4].str()) : 1.0;
    int lp = 0, llp = 0;
    if (num.rfind("loglog", 0) == 0)
        llp = 1;
    else if (num.rfind("log", 0) == 0)
        lp = m[3].matched ? std::stoi(m[3].str()) : 1;
    AsymptoticClass cls;
    cls.power = p;
    cls.log_pow = lp;
    cls.loglog_pow = llp;
    cls.symbolic = true;
    if (llp)
        cls.label = "O(loglog j/j^" + fmt_num(p) + ")";
    else if (lp)
        cls.label = "O(log^" + std::to_string(lp) + " j/j^" + fmt_num(p) + ")";
    else if (p > double(d))
        cls.label = "1/j^{d+eps}";
    else if (p == 1.0)
        cls.label = "c/j";
    else
        cls.label = "1/j^" + fmt_num(p);
    FreezingSequence s;
    if (llp) {
        // loglog j / j^p: numeric table with plateau, tail closed form.
        auto f = [coef, p](std::int64_t j) {
            double x = std::max<double>(double(j), 16.0);
            return coef * std::log(std::log(x)) / std::pow(x, p);
        };
        std::int64_t peak = 16;
        while (f(peak + 1) > f(peak)) ++peak;
        auto g = [f, peak](std::int64_t j) { return f(std::max(j, peak)); };
        s = custom_sequence([&] {
            std::vector<double> v;
            for (std::int64_t j = 0; j <= 64; ++j) v.push_back(g(j));
            return v;
        }());
        s.tail = g;
        s.tail_class = cls;
    } else {
        s = power_sequence({coef, lp, p, 1}, cls);
    }
    s.recipe = Recipe::Custom;
    s.params["expression"] = expr_in;
    return s;
}

double thm51_constant(const Subshift& x, std::int64_t j_max, double h) {
    if (x.dim() != 1) throw InputError("c/j recipe constant is defined for 1D subshifts");
    double c = -std::numeric_limits<double>::infinity();
    for (std::int64_t j = 1; j <= j_max; ++j) c = std::max(c, log_big(count_blocks(x, j)) - double(j) * h);
    return c;
}

}  // namespace thermo
