#pragma once

#include <string>

#include <json.hpp>
#include "thermo/subshift.hpp"

namespace thermo {

SubshiftSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const SubshiftSpec& s);
// Canonical text: sorted keys, two-space indentation, trailing newline.
std::string canonical_spec_text(const SubshiftSpec& s);
SubshiftSpec load_spec_file(const std::string& path);

// Pattern <-> JSON {"offsets": [[...], ...], "cells": [...]}.
Pattern pattern_from_json(const nlohmann::json& j, const Alphabet& a, int dim);
nlohmann::json pattern_to_json(const Pattern& p, const Alphabet& a);
// 1D word from a string whose symbols are single characters (or a JSON array of symbols).
std::vector<Symbol> parse_word(const std::string& text, const Alphabet& a);

}  // namespace thermo
