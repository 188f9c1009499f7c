#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "varexp/experiments.hpp"

namespace varexp {

/// Parsed experiment file: the experiment itself plus output-side switches.
struct SpecFile {
    ExperimentSpec experiment;
    /// When false, every wall-time column is written as 0 so outputs are byte-stable.
    bool timing = true;
};

/// Flat `key = value` lines with dotted keys; `#` starts a comment.
/// Unknown keys and malformed values throw std::invalid_argument naming the line.
SpecFile parse_spec(std::istream& in, const std::string& origin = "<spec>");
SpecFile parse_spec_string(const std::string& text);
SpecFile load_spec(const std::string& path);

/// Replaces the seed with $VAREXP_SEED when that variable holds an integer.
void apply_seed_override(SpecFile& spec);

/// Raw key/value pairs, in key order; exposed for diagnostics and tests.
std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin);

}  // namespace varexp
