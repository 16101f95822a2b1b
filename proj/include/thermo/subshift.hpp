#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "thermo/lattice.hpp"

namespace thermo {

class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> symbols);

    std::size_t size() const { return names_.size(); }
    const std::string& name(Symbol s) const { return names_.at(s); }
    Symbol index(const std::string& name) const;  // throws InputError for unknown symbols
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Symbol> index_;
};

struct BoxWindow {
    enum class Kind { Erg, Stat, Prefix };
    Kind kind = Kind::Erg;
    std::int64_t n = 0;
    int dim = 1;

    static BoxWindow erg(int dim, std::int64_t n) { return {Kind::Erg, n, dim}; }
    static BoxWindow stat(int dim, std::int64_t n) { return {Kind::Stat, n, dim}; }
    static BoxWindow prefix(std::int64_t n) { return {Kind::Prefix, n, 1}; }
    Box box() const;
    std::int64_t volume() const { return box().volume(); }
};

enum class Sided { Two, One };

struct FullShiftKind {
    std::vector<Symbol> sub_alphabet;
};
struct SftKind {
    std::vector<Pattern> forbidden;
};
struct SubstitutionKind {
    std::vector<std::int64_t> box_dims;
    std::vector<Grid> rules;  // rules[s] lives on [0,m_1-1] x ... x [0,m_d-1]
};
struct SinglePointKind {
    Symbol symbol = 0;
};
using SubshiftKind = std::variant<FullShiftKind, SftKind, SubstitutionKind, SinglePointKind>;

struct SubshiftSpec {
    Alphabet alphabet;
    int dim = 1;
    Sided sided = Sided::Two;
    SubshiftKind kind;
    // Extension radius for d >= 2 SFT admissibility; negative means "max forbidden diameter".
    int extension_radius = -1;

    std::string kind_name() const;
    bool one_sided() const { return sided == Sided::One; }
};

// 1D block description: M-word vertices, (M+1)-word edges restricted to the essential part
// (bi-extendable for two-sided, right-extendable for one-sided). Words are base-|A| codes,
// first symbol most significant.
struct BlockGraph {
    int memory = 0;  // M
    int k = 0;       // alphabet size
    std::vector<std::uint8_t> edge;    // size k^(M+1)
    std::vector<std::uint8_t> vertex;  // size k^M
    // admissible_short[l][code] for word lengths l = 0..M
    std::vector<std::vector<std::uint8_t>> admissible_short;
    bool short_complete = true;  // every word of length <= M is admissible

    std::int64_t pow_k(int e) const;
    bool admissible_word(const std::vector<Symbol>& w, const std::vector<bool>* mask = nullptr) const;
};

// Local defect description: a box window is admissible iff no template matches inside it.
struct DefectTemplates {
    std::vector<Pattern> templates;  // each normalized so its bounding box starts at 0
    bool exact = false;
};

class Subshift {
public:
    explicit Subshift(SubshiftSpec spec);

    const SubshiftSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    bool one_sided() const { return spec_.one_sided(); }
    std::size_t alphabet_size() const { return spec_.alphabet.size(); }

    bool admissible(const Pattern& p) const;
    bool admissible(const Grid& g) const;

    const BlockGraph* block_graph() const { return block_.get(); }
    const DefectTemplates* templates() const { return templates_.get(); }
    bool is_substitution() const;
    // Image of a grid under k applications of the substitution.
    Grid expand(const Grid& g, int k) const;
    // Legal 2 x ... x 2 symbol blocks of a substitution subshift.
    const std::vector<Grid>& legal_blocks() const { return legal_blocks_; }
    // Substitution power used for a window of the given per-axis sizes.
    int substitution_level(const Point& sizes) const;
    // Images of all legal blocks at level k (cached).
    const std::vector<Grid>& block_images(int k) const;
    // Symbol that appears in no forbidden pattern (2D SFT exactness witness), or -1.
    int safe_fill() const { return safe_fill_; }
    int extension_radius() const;

private:
    bool admissible_masked(const Grid& g, const std::vector<bool>* mask) const;
    bool admissible_sft_nd(const Grid& g, const std::vector<bool>* mask) const;
    bool admissible_substitution(const Grid& g, const std::vector<bool>* mask) const;
    void check_symbols(const Pattern& p) const;

    SubshiftSpec spec_;
    std::unique_ptr<BlockGraph> block_;
    std::unique_ptr<DefectTemplates> templates_;
    std::vector<Grid> legal_blocks_;
    mutable std::map<int, std::vector<Grid>> image_cache_;
    int safe_fill_ = -1;
};

bool pattern_admissible(const Subshift& x, const Pattern& p);

struct EnumerationGuard {
    double max_candidates = 1 << 24;  // |A|^volume for unpruned search
    double max_patterns = 1 << 22;
};
std::vector<Pattern> enumerate_language(const Subshift& x, const BoxWindow& w,
                                        const EnumerationGuard& guard = {});

Pattern substitution_expand(const Subshift& x, Symbol s, int k, double max_volume = 1 << 24);

Pattern generate_configuration(const Subshift& x, const BoxWindow& w, std::uint64_t seed);
Grid generate_grid(const Subshift& x, const Box& box, std::uint64_t seed);

// Does template t (bounding box at 0) match g with its corner at anchor?
bool template_matches(const Pattern& t, const Grid& g, const Point& anchor);

}  // namespace thermo
