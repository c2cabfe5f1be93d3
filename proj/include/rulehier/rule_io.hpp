#pragma once

// Text form of rules:
//
//   rule := atom " <-" [ " " atom { ", " atom } ]
//   atom := name "(" term "," term ")"
//   term := "X" | "Y" | "V" digits | name
//
// Names that could be confused with variables or grammar punctuation are
// wrapped in backquotes. Skolem constants print as `sk<i>` and are not
// meant to be parsed back.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rulehier/rule.hpp"
#include "rulehier/triple_store.hpp"

namespace rulehier {

class RuleParseError : public std::runtime_error {
public:
    RuleParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

std::string format_rule(const Rule& rule, const Vocabulary& vocab);
std::string format_atom(const Atom& atom, const Vocabulary& vocab);

/// Parses a rule, interning unknown names. When `consumed` is null the whole
/// input must be a rule (trailing whitespace allowed); otherwise parsing
/// stops after the last atom and the end offset is stored.
Rule parse_rule(std::string_view text, Vocabulary& vocab, std::size_t* consumed = nullptr);

}  // namespace rulehier
