#pragma once

// Subsumption deciders over chain rules. Every decider answers "does p
// subsume q", i.e. is q at least as specific as p.

#include <cstddef>
#include <vector>

#include "rulehier/rule.hpp"

namespace rulehier {

/// One elimination attempt of the object-identity proof procedure: atom
/// `p_index` of the subsumer tested against atom `q_index` of the
/// skolemized subsumee (index 0 is the head).
struct EliminationStep {
    std::size_t p_index;
    std::size_t q_index;
    bool eliminated;

    friend bool operator==(const EliminationStep&, const EliminationStep&) = default;
};

/// Plain theta-subsumption by exhaustive search over atom assignments.
/// Exponential; intended as a test oracle.
bool theta_subsumes(const Rule& p, const Rule& q);

/// Theta-subsumption under object identity: skolemize q, eliminate p's atoms
/// left to right against same-predicate atoms of S(q), backtracking on
/// failure, with an injective substitution that never merges a variable
/// with one of p's constants.
bool oi_subsumes(const Rule& p, const Rule& q, std::vector<EliminationStep>* trace = nullptr);

/// Positional check: p[i] must unify with q[i] for i = 0..|p| under one
/// injective binding, built in a single pass.
bool sa_subsumes(const Rule& p, const Rule& q);

/// sa_subsumes(p, q) or sa_subsumes(p, reverse_body(q)).
bool sa_subsumes_complete(const Rule& p, const Rule& q);

/// One added atom: SA, same deduction level, |q| = |p| + 1.
bool a_subsumes(const Rule& p, const Rule& q);

/// One instantiated variable: SA, same length, d(q) = d(p) + 1.
bool i_subsumes(const Rule& p, const Rule& q);

/// Definition-5 inequality as printed (d(p) = d(q) + 1). Never holds
/// together with sa_subsumes; kept so both readings can be tested.
bool i_subsumes_as_printed(const Rule& p, const Rule& q);

}  // namespace rulehier
