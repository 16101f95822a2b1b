// thermo: command-line front end for the freezing-potential toolkit.
#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "thermo/complexity.hpp"
#include "thermo/errors.hpp"
#include "thermo/format.hpp"
#include "thermo/gibbs.hpp"
#include "thermo/potential.hpp"
#include "thermo/pressure.hpp"
#include "thermo/sequence.hpp"
#include "thermo/spec_io.hpp"
#include "thermo/tiling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thermo;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Rounds every float to 12 significant digits.
json round_numbers(const json& j) {
    if (j.is_number_float()) return std::stod(fmt_num(j.get<double>()));
    if (j.is_array() || j.is_object()) {
        json out = j;
        for (auto it = out.begin(); it != out.end(); ++it) *it = round_numbers(*it);
        return out;
    }
    return j;
}

struct Globals {
    std::string out_dir = ".";
    int workers = 1;
};

struct SeqOptions {
    std::string recipe = "thm34";
    int i_max = -1;
    double c = 0;
    std::int64_t j_max = 64;
    std::string expr;
    double h_ref = std::numeric_limits<double>::quiet_NaN();
    std::int64_t entropy_n = 8;
};

void add_seq_options(CLI::App* cmd, SeqOptions& o) {
    cmd->add_option("--recipe", o.recipe, "thm34 | thm51 | thm52 | cor53 | custom")
        ->check(CLI::IsMember({"thm34", "thm51", "thm52", "cor53", "custom"}));
    cmd->add_option("--i-max", o.i_max, "dyadic depth of the kappa table (thm34, thm52)");
    cmd->add_option("--c", o.c, "constant of the c/j recipe; computed from counts when omitted");
    cmd->add_option("--j-max", o.j_max, "table length for thm52");
    cmd->add_option("--sequence", o.expr, "expression for custom sequences, e.g. 1/n^2");
    cmd->add_option("--h-ref", o.h_ref, "override the reference entropy");
    cmd->add_option("--entropy-n", o.entropy_n, "largest box side used for entropy upper bounds");
}

HRef pick_href(const Subshift& x, const SeqOptions& o) {
    if (!std::isnan(o.h_ref)) return {o.h_ref, HRef::Source::User};
    return reference_entropy(entropy_bounds(x, o.entropy_n));
}

FreezingSequence build_sequence(const Subshift& x, const SeqOptions& o) {
    if (o.recipe == "thm34") {
        int i_max = o.i_max >= 0 ? o.i_max : (x.dim() == 1 ? 10 : 3);
        return build_thm34_sequence(kappa_source(x, i_max, pick_href(x, o)), i_max);
    }
    if (o.recipe == "thm51") {
        double c = o.c;
        if (!(c > 0)) {
            HRef h = pick_href(x, o);
            c = thm51_constant(x, 64, h.value);
        }
        return build_thm51_sequence(c);
    }
    if (o.recipe == "thm52") {
        int need = 0;
        while ((std::int64_t(2) << need) <= o.j_max) ++need;
        return build_thm52_sequence(kappa_sequence(x, std::max(need, o.i_max), pick_href(x, o)), o.j_max);
    }
    if (o.recipe == "cor53") return build_cor53_sequence();
    if (o.expr.empty()) throw InputError("custom recipe needs --sequence");
    return sequence_from_expression(o.expr, x.dim());
}

std::vector<double> parse_grid(const std::string& text) {
    if (text == "default") return default_beta_grid();
    std::vector<double> g;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            g.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw InputError("bad beta value '" + cell + "'");
        }
    }
    if (g.empty()) throw InputError("empty beta grid");
    std::sort(g.begin(), g.end());
    return g;
}

class Run {
public:
    Run(std::string command, const Globals& g) : command_(std::move(command)), g_(g), start_(iso_now()) {
        fs::create_directories(g_.out_dir);
    }
    void param(const std::string& k, json v) { params_[k] = std::move(v); }
    void spec_file(const std::string& path) { spec_hash_ = sha256_hex(read_file(path)); }
    void write(const std::string& name, const std::string& content) {
        fs::path p = fs::path(g_.out_dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw InputError("cannot write " + p.string());
        out << content;
        outputs_.push_back({{"file", name}, {"sha256", sha256_hex(content)}});
    }
    void write_json(const std::string& name, const json& j) { write(name, round_numbers(j).dump(2) + "\n"); }
    void finish() {
        json m;
        m["command"] = command_;
        m["spec_sha256"] = spec_hash_;
        m["parameters"] = round_numbers(params_);
        m["tool_version"] = kVersion;
        m["rng"] = CounterRng::kAlgorithm;
        m["timestamps"] = {{"start", start_}, {"end", iso_now()}};
        m["outputs"] = outputs_;
        std::ofstream(fs::path(g_.out_dir) / "manifest.json") << m.dump(2) << "\n";
    }

private:
    std::string command_;
    Globals g_;
    std::string start_;
    std::string spec_hash_;
    json params_ = json::object();
    json outputs_ = json::array();
};

std::shared_ptr<const Subshift> load_subshift(const std::string& path) {
    return std::make_shared<const Subshift>(load_spec_file(path));
}

Grid load_config(const Subshift& x, const std::string& word, const std::string& file) {
    if (!word.empty()) {
        if (x.dim() != 1) throw InputError("--word needs a 1D spec");
        auto w = parse_word(word, x.spec().alphabet);
        Grid g(Box::cube(1, 0, static_cast<std::int64_t>(w.size())));
        g.cells = w;
        return g;
    }
    if (file.empty()) throw InputError("give --word or --config");
    json j = json::parse(read_file(file));
    Pattern p = pattern_from_json(j, x.spec().alphabet, x.dim());
    if (!p.is_box()) throw InputError("configuration must fill a box");
    return p.to_grid();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Freezing phase transitions toolkit: subshifts, potentials, pressure, tilings, Gibbs sampling"};
    app.set_version_flag("--version", kVersion);
    Globals g;
    if (const char* w = std::getenv("THERMO_WORKERS")) g.workers = std::max(1, std::atoi(w));
    app.add_option("--out-dir", g.out_dir, "directory for outputs and manifest.json");
    app.add_option("--workers", g.workers, "worker threads (default: THERMO_WORKERS or 1)");
    app.require_subcommand(1);

    std::string spec_path;
    SeqOptions so;

    auto* spec_cmd = app.add_subcommand("spec", "spec utilities")->require_subcommand(1);
    auto* validate = spec_cmd->add_subcommand("validate", "load a spec and emit its canonical form");
    validate->add_option("--spec", spec_path)->required();

    auto* lang = app.add_subcommand("lang", "language utilities")->require_subcommand(1);
    auto* count = lang->add_subcommand("count", "count admissible n-blocks");
    std::int64_t n_max = 8;
    count->add_option("--spec", spec_path)->required();
    count->add_option("--n-max", n_max);

    auto* entropy = app.add_subcommand("entropy", "entropy bounds and kappa table");
    int kappa_depth = 4;
    entropy->add_option("--spec", spec_path)->required();
    entropy->add_option("--n-max", n_max);
    entropy->add_option("--kappa-depth", kappa_depth);

    auto* pot_cmd = app.add_subcommand("potential", "potential utilities")->require_subcommand(1);
    auto* build = pot_cmd->add_subcommand("build", "tabulate a freezing sequence and its interaction");
    std::int64_t table_j = 64, interaction_n = 0;
    build->add_option("--spec", spec_path)->required();
    build->add_option("--table", table_j, "write a_0..a_table");
    build->add_option("--interaction-n", interaction_n, "also write the interaction through this radius");
    add_seq_options(build, so);

    auto* pressure = app.add_subcommand("pressure", "pressure utilities")->require_subcommand(1);
    auto* curve = pressure->add_subcommand("curve", "pressure curve with brackets");
    std::int64_t R = 10, renewal_n = 1000000;
    std::string grid_text = "default", method = "auto";
    int torus_n = 4;
    double tol = 1e-10;
    curve->add_option("--spec", spec_path)->required();
    curve->add_option("--R", R);
    curve->add_option("--beta-grid", grid_text, "'default' or comma-separated betas");
    curve->add_option("--method", method)->check(CLI::IsMember({"auto", "transfer", "renewal", "torus"}));
    curve->add_option("--torus-n", torus_n);
    curve->add_option("--n-max", renewal_n, "renewal truncation");
    curve->add_option("--tol", tol);
    add_seq_options(curve, so);

    auto* freeze = app.add_subcommand("freeze", "freezing detection")->require_subcommand(1);
    auto* detect = freeze->add_subcommand("detect", "detect an affine tail in a pressure curve");
    std::string curve_path;
    double tail_fraction = 0.25;
    detect->add_option("--curve", curve_path)->required();
    detect->add_option("--tail-fraction", tail_fraction);

    auto* tile = app.add_subcommand("tile", "dyadic tiling of a configuration");
    std::string word, config_path, offset_text = "0";
    int depth = 16;
    tile->add_option("--spec", spec_path)->required();
    tile->add_option("--word", word);
    tile->add_option("--config", config_path, "JSON pattern filling a box");
    tile->add_option("--offset", offset_text, "comma-separated odometer offsets");
    tile->add_option("--depth", depth);

    auto* pins = app.add_subcommand("pins", "pin decomposition of a one-sided word");
    pins->add_option("--spec", spec_path)->required();
    pins->add_option("--word", word)->required();

    auto* sample = app.add_subcommand("sample", "Metropolis chain on a torus");
    double beta = 1;
    int side = 16;
    std::uint64_t steps = 100000, seed = 1, telemetry_every = 1000;
    sample->add_option("--spec", spec_path)->required();
    sample->add_option("--R", R);
    sample->add_option("--beta", beta);
    sample->add_option("--n", side);
    sample->add_option("--steps", steps);
    sample->add_option("--seed", seed);
    sample->add_option("--telemetry-every", telemetry_every);
    add_seq_options(sample, so);

    auto* nogo = app.add_subcommand("nogo", "summability test for a freezing sequence");
    int d = 1;
    nogo->add_option("--spec", spec_path);
    nogo->add_option("--d", d);
    add_seq_options(nogo, so);

    auto* gibbs = app.add_subcommand("gibbs", "Gibbs specification utilities")->require_subcommand(1);
    auto* weights = gibbs->add_subcommand("weights", "exact conditional weights on a small box");
    std::int64_t box_len = 3, gibbs_n = 2;
    std::string boundary_symbol;
    weights->add_option("--spec", spec_path)->required();
    weights->add_option("--box", box_len, "box side length");
    weights->add_option("--n-max", gibbs_n, "interaction truncation radius");
    weights->add_option("--beta", beta);
    weights->add_option("--boundary", boundary_symbol, "constant boundary symbol (default: first symbol)");
    weights->add_option("--seed", seed, "random boundary when --boundary is 'random'");
    add_seq_options(weights, so);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        bool unknown = dynamic_cast<const CLI::ExtrasError*>(&e) || dynamic_cast<const CLI::RequiredError*>(&e);
        std::string msg = e.what();
        if (unknown && (msg.find("subcommand") != std::string::npos || msg.find("xtra") != std::string::npos ||
                        msg.find("not expected") != std::string::npos)) {
            std::cerr << msg << "\n\n" << app.help();
            return 64;
        }
        std::cerr << "input error: " << msg << "\n";
        return 2;
    }

    try {
        if (validate->parsed()) {
            Run run("spec validate", g);
            run.spec_file(spec_path);
            Subshift x(load_spec_file(spec_path));
            std::string text = canonical_spec_text(x.spec());
            run.write("spec.json", text);
            std::cout << text;
            run.finish();
        } else if (count->parsed()) {
            Run run("lang count", g);
            run.spec_file(spec_path);
            run.param("n_max", n_max);
            Subshift x(load_spec_file(spec_path));
            std::vector<std::int64_t> ns;
            for (std::int64_t n = 1; n <= n_max; ++n) ns.push_back(n);
            auto t = complexity_table(x, ns);
            run.write("complexity.csv", t.to_csv());
            std::cout << t.to_csv();
            run.finish();
        } else if (entropy->parsed()) {
            Run run("entropy", g);
            run.spec_file(spec_path);
            run.param("n_max", n_max);
            run.param("kappa_depth", kappa_depth);
            Subshift x(load_spec_file(spec_path));
            auto e = entropy_bounds(x, n_max);
            HRef h = reference_entropy(e);
            auto k = kappa_sequence(x, kappa_depth, h);
            json j = {{"upper", e.upper}, {"lower", e.lower}, {"provenance", e.provenance},
                      {"h_ref", h.value}, {"h_ref_source", h.describe()}, {"kappa", k.kappa}};
            if (e.exact) j["exact"] = *e.exact;
            run.write_json("entropy.json", j);
            std::cout << round_numbers(j).dump(2) << "\n";
            run.finish();
        } else if (build->parsed()) {
            Run run("potential build", g);
            run.spec_file(spec_path);
            run.param("recipe", so.recipe);
            run.param("table", table_j);
            Subshift x(load_spec_file(spec_path));
            auto seq = build_sequence(x, so);
            run.write("sequence.csv", seq.to_csv(table_j));
            run.write_json("sequence.json", seq.to_json(table_j));
            if (interaction_n > 0) run.write("interaction.csv", generate_interaction(seq, x, interaction_n).to_csv());
            std::cout << seq.to_csv(std::min<std::int64_t>(table_j, 16));
            run.finish();
        } else if (curve->parsed()) {
            Run run("pressure curve", g);
            run.spec_file(spec_path);
            run.param("recipe", so.recipe);
            run.param("R", R);
            run.param("beta_grid", grid_text);
            run.param("method", method);
            auto x = load_subshift(spec_path);
            auto seq = build_sequence(*x, so);
            auto betas = parse_grid(grid_text);
            std::string m = method;
            if (m == "auto") m = x->dim() == 2 ? "torus" : "transfer";
            PressureCurve c;
            if (m == "transfer") {
                TransferOptions opt;
                opt.tol = tol;
                TransferModel model(TruncatedPotential(x, seq, R), opt);
                c = evaluate_curve(betas, [&](double b) { return model.at(b); }, g.workers);
            } else if (m == "renewal") {
                RenewalModel model(*x, seq, renewal_n);
                c = evaluate_curve(betas, [&](double b) { return model.at(b); }, g.workers);
            } else {
                TruncatedPotential pot(x, seq, R);
                TorusModel big(pot, torus_n), small(pot, std::max(1, torus_n - 1));
                c = evaluate_curve(
                    betas,
                    [&](double b) {
                        PressurePoint p;
                        p.beta = b;
                        p.method = "torus-2d";
                        p.R = R;
                        p.rigorous = false;
                        p.estimate = big.log_z_per_site(b);
                        p.finite_size_slack = std::abs(p.estimate - small.log_z_per_site(b));
                        p.lower = p.estimate - b * pot.error_bound();
                        p.upper = p.estimate;
                        return p;
                    },
                    g.workers);
            }
            run.write("curve.csv", c.to_csv());
            std::cout << c.to_csv();
            run.finish();
        } else if (detect->parsed()) {
            Run run("freeze detect", g);
            run.param("curve", curve_path);
            run.param("tail_fraction", tail_fraction);
            auto c = PressureCurve::from_csv(read_file(curve_path));
            auto r = detect_freeze(c, tail_fraction);
            json j = r.to_json();
            run.write_json("freeze.json", j);
            std::cout << round_numbers(j).dump(2) << "\n";
            run.finish();
        } else if (tile->parsed()) {
            Run run("tile", g);
            run.spec_file(spec_path);
            run.param("offset", offset_text);
            run.param("depth", depth);
            Subshift x(load_spec_file(spec_path));
            Grid cfg = load_config(x, word, config_path);
            Point o;
            std::stringstream ss(offset_text);
            std::string cell;
            for (int i = 0; std::getline(ss, cell, ',') && i < x.dim(); ++i) o[i] = std::stoll(cell);
            auto t = tile_decomposition(x, cfg, OdometerOffset(x.dim(), o, depth));
            run.write_json("tiling.json", t.to_json());
            std::cout << round_numbers(t.to_json()).dump(2) << "\n";
            run.finish();
        } else if (pins->parsed()) {
            Run run("pins", g);
            run.spec_file(spec_path);
            run.param("word", word);
            Subshift x(load_spec_file(spec_path));
            auto p = pin_decomposition(x, parse_word(word, x.spec().alphabet));
            run.write_json("pins.json", p.to_json());
            std::cout << p.to_json().dump(2) << "\n";
            run.finish();
        } else if (sample->parsed()) {
            Run run("sample", g);
            run.spec_file(spec_path);
            run.param("recipe", so.recipe);
            run.param("R", R);
            run.param("beta", beta);
            run.param("n", side);
            run.param("steps", steps);
            run.param("seed", seed);
            auto x = load_subshift(spec_path);
            TruncatedPotential pot(x, build_sequence(*x, so), R);
            auto st = metropolis_run(pot, beta, side, steps, seed, telemetry_every);
            json j = {{"n", st.n},
                      {"dim", st.dim},
                      {"seed", st.seed},
                      {"steps", st.steps},
                      {"accepted", st.accepted},
                      {"energy", st.energy},
                      {"mean_inadmissible_mass", st.mean_inadmissible_mass},
                      {"symbol_frequency", st.symbol_frequency},
                      {"rng", st.rng}};
            run.write_json("chain.json", j);
            run.write("telemetry.csv", st.telemetry_csv());
            std::cout << round_numbers(j).dump(2) << "\n";
            run.finish();
        } else if (nogo->parsed()) {
            Run run("nogo", g);
            run.param("d", d);
            run.param("recipe", so.recipe);
            FreezingSequence seq;
            if (!spec_path.empty()) {
                run.spec_file(spec_path);
                Subshift x(load_spec_file(spec_path));
                d = x.dim();
                seq = build_sequence(x, so);
            } else {
                if (so.expr.empty()) throw InputError("nogo needs --sequence or --spec");
                run.param("sequence", so.expr);
                seq = sequence_from_expression(so.expr, d);
            }
            auto r = nogo_classify(seq, d);
            run.write_json("nogo.json", r.to_json());
            std::cout << round_numbers(r.to_json()).dump(2) << "\n";
            run.finish();
        } else if (weights->parsed()) {
            Run run("gibbs weights", g);
            run.spec_file(spec_path);
            run.param("box", box_len);
            run.param("n_max", gibbs_n);
            run.param("beta", beta);
            auto x = load_subshift(spec_path);
            auto seq = build_sequence(*x, so);
            FiniteSpecification spec;
            spec.x = x;
            spec.phi = generate_interaction(seq, *x, gibbs_n);
            spec.lambda = Box::cube(x->dim(), 0, box_len);
            spec.beta = beta;
            spec.boundary = Grid(spec.collar_box());
            if (boundary_symbol == "random") {
                CounterRng rng(seed, 3);
                for (auto& s : spec.boundary.cells) s = static_cast<Symbol>(rng.below(x->alphabet_size()));
            } else if (!boundary_symbol.empty()) {
                Symbol s = x->spec().alphabet.index(boundary_symbol);
                for (auto& c : spec.boundary.cells) c = s;
            }
            auto w = conditional_weights(spec);
            double rho = full_support_rho(spec.phi, x->alphabet_size(), beta);
            json j = {{"weights", weights_to_json(w, x->spec().alphabet)},
                      {"rho", rho},
                      {"rho_margin", rho_bound_margin(w, rho)}};
            run.write_json("weights.json", j);
            std::cout << round_numbers(j).dump(2) << "\n";
            run.finish();
        }
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const UndeterminedError& e) {
        std::cerr << "input error: " << e.what() << " (level " << e.level() << ")\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "resource error: " << e.what() << " [" << e.lower() << ", " << e.upper() << "]\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
