#include "thermo/spec_io.hpp"

#include <fstream>
#include <sstream>

#include "thermo/errors.hpp"

namespace thermo {

using nlohmann::json;

namespace {

Point point_from_json(const json& j, int dim) {
    Point p;
    if (j.is_number_integer()) {
        if (dim != 1) throw InputError("scalar offset used in a multi-dimensional pattern");
        p[0] = j.get<std::int64_t>();
        return p;
    }
    if (!j.is_array() || static_cast<int>(j.size()) != dim) throw InputError("offset has wrong dimension");
    for (int i = 0; i < dim; ++i) p[i] = j[i].get<std::int64_t>();
    return p;
}

json point_to_json(const Point& p, int dim) {
    json a = json::array();
    for (int i = 0; i < dim; ++i) a.push_back(p[i]);
    return a;
}

// Nested arrays of symbol names -> grid on [0, box_dims).
void fill_rule(const json& j, const Alphabet& a, const std::vector<std::int64_t>& dims, int axis, Point& at,
               Grid& g) {
    if (!j.is_array() || static_cast<std::int64_t>(j.size()) != dims[axis])
        throw InputError("substitution rule shape differs from the declared box");
    for (std::int64_t i = 0; i < dims[axis]; ++i) {
        at[axis] = i;
        if (axis + 1 == static_cast<int>(dims.size())) {
            if (!j[i].is_string()) throw InputError("substitution rule cells must be symbol strings");
            g.at(at) = a.index(j[i].get<std::string>());
        } else {
            fill_rule(j[i], a, dims, axis + 1, at, g);
        }
    }
}

json rule_to_json(const Grid& g, const Alphabet& a, int axis, Point& at) {
    json arr = json::array();
    for (std::int64_t i = 0; i < g.box.size[axis]; ++i) {
        at[axis] = i;
        if (axis + 1 == g.box.dim)
            arr.push_back(a.name(g.at(at)));
        else
            arr.push_back(rule_to_json(g, a, axis + 1, at));
    }
    return arr;
}

}  // namespace

Pattern pattern_from_json(const json& j, const Alphabet& a, int dim) {
    if (!j.is_object() || !j.contains("offsets") || !j.contains("cells"))
        throw InputError("pattern needs 'offsets' and 'cells'");
    std::vector<Point> off;
    std::vector<Symbol> sym;
    for (const auto& o : j.at("offsets")) off.push_back(point_from_json(o, dim));
    for (const auto& c : j.at("cells")) sym.push_back(a.index(c.get<std::string>()));
    return Pattern(dim, std::move(off), std::move(sym));
}

json pattern_to_json(const Pattern& p, const Alphabet& a) {
    json off = json::array(), cells = json::array();
    for (std::size_t k = 0; k < p.size(); ++k) {
        off.push_back(point_to_json(p.offsets()[k], p.dim()));
        cells.push_back(a.name(p.symbols()[k]));
    }
    return json{{"offsets", off}, {"cells", cells}};
}

SubshiftSpec spec_from_json(const json& j) {
    try {
        SubshiftSpec s;
        s.alphabet = Alphabet(j.at("alphabet").get<std::vector<std::string>>());
        s.dim = j.at("dimension").get<int>();
        if (s.dim < 1 || s.dim > kMaxDim) throw InputError("unsupported dimension");
        std::string sided = j.value("sided", "two");
        if (sided == "two")
            s.sided = Sided::Two;
        else if (sided == "one")
            s.sided = Sided::One;
        else
            throw InputError("sided must be \"two\" or \"one\"");
        if (j.contains("extension_radius")) s.extension_radius = j.at("extension_radius").get<int>();
        const json& k = j.at("kind");
        std::string type = k.at("type").get<std::string>();
        if (type == "full") {
            FullShiftKind f;
            if (k.contains("sub_alphabet")) {
                for (const auto& n : k.at("sub_alphabet")) f.sub_alphabet.push_back(s.alphabet.index(n.get<std::string>()));
            } else {
                for (std::size_t i = 0; i < s.alphabet.size(); ++i) f.sub_alphabet.push_back(static_cast<Symbol>(i));
            }
            s.kind = f;
        } else if (type == "sft") {
            SftKind f;
            for (const auto& p : k.at("forbidden")) f.forbidden.push_back(pattern_from_json(p, s.alphabet, s.dim));
            s.kind = f;
        } else if (type == "substitution") {
            SubstitutionKind sub;
            sub.box_dims = k.at("box").get<std::vector<std::int64_t>>();
            if (static_cast<int>(sub.box_dims.size()) != s.dim) throw InputError("substitution box has wrong dimension");
            for (auto m : sub.box_dims)
                if (m < 2) throw InputError("substitution box sides must be >= 2");
            Box b;
            b.dim = s.dim;
            for (int i = 0; i < s.dim; ++i) b.size[i] = sub.box_dims[i];
            const json& rules = k.at("rules");
            for (std::size_t i = 0; i < s.alphabet.size(); ++i) {
                const std::string& name = s.alphabet.name(static_cast<Symbol>(i));
                if (!rules.contains(name)) throw InputError("substitution has no rule for symbol '" + name + "'");
                Grid g(b);
                Point at;
                fill_rule(rules.at(name), s.alphabet, sub.box_dims, 0, at, g);
                sub.rules.push_back(g);
            }
            s.kind = sub;
        } else if (type == "single_point") {
            s.kind = SinglePointKind{s.alphabet.index(k.at("symbol").get<std::string>())};
        } else {
            throw InputError("unknown subshift kind '" + type + "'");
        }
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed spec JSON: ") + e.what());
    }
}

json spec_to_json(const SubshiftSpec& s) {
    json j;
    j["alphabet"] = s.alphabet.names();
    j["dimension"] = s.dim;
    j["sided"] = s.one_sided() ? "one" : "two";
    if (s.extension_radius >= 0) j["extension_radius"] = s.extension_radius;
    json k;
    if (const auto* f = std::get_if<FullShiftKind>(&s.kind)) {
        k["type"] = "full";
        json sub = json::array();
        for (auto a : f->sub_alphabet) sub.push_back(s.alphabet.name(a));
        k["sub_alphabet"] = sub;
    } else if (const auto* f = std::get_if<SftKind>(&s.kind)) {
        k["type"] = "sft";
        json forb = json::array();
        for (const auto& p : f->forbidden) forb.push_back(pattern_to_json(p, s.alphabet));
        k["forbidden"] = forb;
    } else if (const auto* f = std::get_if<SubstitutionKind>(&s.kind)) {
        k["type"] = "substitution";
        k["box"] = f->box_dims;
        json rules = json::object();
        for (std::size_t i = 0; i < f->rules.size(); ++i) {
            Point at;
            rules[s.alphabet.name(static_cast<Symbol>(i))] = rule_to_json(f->rules[i], s.alphabet, 0, at);
        }
        k["rules"] = rules;
    } else if (const auto* f = std::get_if<SinglePointKind>(&s.kind)) {
        k["type"] = "single_point";
        k["symbol"] = s.alphabet.name(f->symbol);
    }
    j["kind"] = k;
    return j;
}

std::string canonical_spec_text(const SubshiftSpec& s) { return spec_to_json(s).dump(2) + "\n"; }

SubshiftSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open spec file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("spec file is not valid JSON: " + std::string(e.what()));
    }
    return spec_from_json(j);
}

std::vector<Symbol> parse_word(const std::string& text, const Alphabet& a) {
    std::vector<Symbol> w;
    if (!text.empty() && text.front() == '[') {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.is_array()) throw InputError("word is not a JSON array");
        for (const auto& s : j) w.push_back(a.index(s.get<std::string>()));
        return w;
    }
    for (char c : text) w.push_back(a.index(std::string(1, c)));
    return w;
}

}  // namespace thermo
