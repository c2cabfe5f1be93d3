#pragma once

// Paths and first-order chain rules over binary predicates.
//
// Variables are numbered: X = 0, Y = 1, body variables V_i = 2 + i. Rules
// are kept in normal form, body variables renumbered by first occurrence in
// body order, so structural equality is plain value equality.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "rulehier/triple_store.hpp"

namespace rulehier {

inline constexpr std::uint32_t kVarX = 0;
inline constexpr std::uint32_t kVarY = 1;
inline constexpr std::uint32_t kFirstBodyVar = 2;

struct Term {
    enum class Kind : std::uint8_t { Variable, Constant };

    Kind kind = Kind::Variable;
    std::uint32_t id = 0;

    static constexpr Term var(std::uint32_t v) { return {Kind::Variable, v}; }
    static constexpr Term constant(EntityId e) { return {Kind::Constant, e}; }
    static constexpr Term x() { return var(kVarX); }
    static constexpr Term y() { return var(kVarY); }

    constexpr bool is_var() const { return kind == Kind::Variable; }
    constexpr bool is_const() const { return kind == Kind::Constant; }
    constexpr bool is_skolem() const { return is_const() && id >= kSkolemBase; }

    friend constexpr bool operator==(const Term&, const Term&) = default;
    friend constexpr auto operator<=>(const Term&, const Term&) = default;
};

struct Atom {
    RelationId pred = 0;
    Term subject;
    Term object;

    constexpr bool mentions(const Term& t) const { return subject == t || object == t; }

    friend constexpr bool operator==(const Atom&, const Atom&) = default;
    friend constexpr auto operator<=>(const Atom&, const Atom&) = default;
};

enum class RuleKind : std::uint8_t { CAR, OAR, HAR, BAR, INSR };

std::string_view kind_name(RuleKind k);
RuleKind parse_kind(std::string_view s);

class RuleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Rule {
public:
    /// Normalizes body variables and derives the kind. The head subject must
    /// be X or a constant and the head object Y or a constant; X and Y may
    /// only occur in the body if they occur in the head.
    Rule(Atom head, std::vector<Atom> body = {});

    /// Top rule `r(X,Y) <-` for predicate `target`.
    static Rule top(RelationId target);

    const Atom& head() const noexcept { return head_; }
    std::span<const Atom> body() const noexcept { return body_; }
    /// Index 0 is the head, body atoms occupy 1..length().
    const Atom& atom(std::size_t i) const { return i == 0 ? head_ : body_.at(i - 1); }
    std::size_t length() const noexcept { return body_.size(); }
    RelationId target() const noexcept { return head_.pred; }

    RuleKind kind() const noexcept { return kind_; }
    /// Number of distinct constants.
    std::size_t deduction_level() const noexcept { return deduction_level_; }
    bool is_abstract() const noexcept { return deduction_level_ == 0; }
    bool is_top() const noexcept { return body_.empty() && deduction_level_ == 0; }

    /// One past the largest variable id in use (at least 2).
    std::uint32_t variable_count() const noexcept { return var_count_; }
    /// Distinct constants in order of first occurrence (head first).
    std::vector<EntityId> constants() const;
    bool mentions(const Term& t) const;
    std::size_t occurrences(const Term& t) const;

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.head_ == b.head_ && a.body_ == b.body_;
    }
    friend std::strong_ordering operator<=>(const Rule& a, const Rule& b);

private:
    void normalize();
    RuleKind classify() const;

    Atom head_;
    std::vector<Atom> body_;
    RuleKind kind_ = RuleKind::OAR;
    std::uint32_t deduction_level_ = 0;
    std::uint32_t var_count_ = 2;
};

struct RuleHash {
    std::size_t operator()(const Rule& r) const noexcept;
};

/// A ground walk: the originating instance of the target predicate followed
/// by the traversed triples in walk order. Triples keep their KG orientation.
struct Path {
    Triple head;
    std::vector<Triple> body;
};

// Definition checks.
bool is_connected(const Rule& rule);
bool is_straight(const Rule& rule);
inline std::size_t deduction_level(const Rule& rule) { return rule.deduction_level(); }
inline std::size_t body_length(const Rule& rule) { return rule.length(); }

/// Term of the last body atom that is not shared with its predecessor (the
/// head when the body has one atom) and occurs nowhere else. Empty when no
/// such term exists or the body is empty.
std::optional<Term> dangling_term(const Rule& rule);

/// Abstracts a ground walk: e_0 -> X, e_1 -> Y, other entities -> fresh
/// variables in walk order. Returns nullopt for walks that are not straight
/// or connected, or whose head instance is a self loop.
std::optional<Rule> generalize(const Path& path);

/// Variables of `base` marked for instantiation by a specialization step.
struct SpecializationTemplate {
    Rule base;
    std::vector<std::uint32_t> slots;
};

struct Binding {
    std::uint32_t var;
    EntityId value;
};

/// HAR template binds Y; BAR template binds Y and the last body atom's
/// dangling variable. Throws RuleError unless `oar` is an OAR with a body.
std::pair<SpecializationTemplate, SpecializationTemplate> specialize_templates(const Rule& oar);

/// Replaces each bound variable by its constant. Returns nullopt when a
/// binding names an unknown variable, or a value collides with another
/// binding or with a constant already in the rule.
std::optional<Rule> instantiate(const Rule& rule, std::span<const Binding> bindings);
/// Binds `values[i]` to `tmpl.slots[i]`; sizes must match.
std::optional<Rule> instantiate(const SpecializationTemplate& tmpl, std::span<const EntityId> values);

/// Replaces every variable v by the skolem constant kSkolemBase + v.
Rule skolemize(const Rule& rule);

/// Same atoms in reverse body order.
Rule reverse_body(const Rule& rule);

/// Inverse of an instantiation: every occurrence of constant `c` becomes X
/// (head subject), Y (head object) or a fresh body variable.
Rule variabilize(const Rule& rule, EntityId c);

/// Rule without its last body atom.
Rule drop_last_atom(const Rule& rule);

}  // namespace rulehier
