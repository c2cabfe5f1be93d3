#pragma once

// Learned-rule files, one rule per line:
//
//   <rule> | supp=<int> | hc=<float> | sc=<float> | kind=<CAR|OAR|HAR|BAR|INSR>
//
// Lines starting with '#' and blank lines are ignored.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "rulehier/measures.hpp"
#include "rulehier/rule.hpp"

namespace rulehier {

struct RuleLine {
    Rule rule;
    std::size_t supp = 0;
    double hc = 0.0;
    double sc = 0.0;
};

std::string format_rule_line(const Rule& rule, const Measures& m, const Vocabulary& vocab);

/// Throws ParseError with the offending line number; a stated kind that
/// disagrees with the rule's own kind is an error.
RuleLine parse_rule_line(std::string_view line, Vocabulary& vocab, std::size_t line_no = 1);
std::vector<RuleLine> read_rule_file(std::istream& in, Vocabulary& vocab);

}  // namespace rulehier
