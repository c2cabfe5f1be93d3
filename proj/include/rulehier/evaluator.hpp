#pragma once

// Knowledge graph completion with a learned rule set: candidate suggestion,
// filtered ranking by maximum aggregation, MRR and Hits@k.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rulehier/rule.hpp"
#include "rulehier/triple_store.hpp"

namespace rulehier {

enum class QuerySlot : std::uint8_t {
    Tail,  // r(e, ?)
    Head,  // r(?, e)
};

struct Query {
    RelationId target = 0;
    EntityId known = 0;
    QuerySlot slot = QuerySlot::Tail;
    EntityId answer = 0;

    /// The triple asserting `candidate` as the answer.
    Triple triple_for(EntityId candidate) const {
        return slot == QuerySlot::Tail ? Triple{target, known, candidate} : Triple{target, candidate, known};
    }
};

struct ScoredRule {
    Rule rule;
    double sc = 0.0;
};

using CandidateMap = std::unordered_map<EntityId, std::vector<double>>;

/// Candidates for `q` from the rules of its target; each rule adds its sc
/// once to every candidate it suggests. Rules leave the unknown slot
/// unconstrained by the body are skipped. Grounds over train only.
CandidateMap suggest(const Query& q, std::span<const ScoredRule> rules, const TripleStore& store,
                     std::size_t max_groundings = 1'000'000);

struct RankedCandidate {
    EntityId entity;
    std::vector<double> confidences;  // descending
};

struct PredictionRanking {
    std::vector<RankedCandidate> order;

    /// 1-based position of `e`, or nullopt if not ranked.
    std::optional<std::size_t> rank_of(EntityId e) const;
};

/// Candidate order: compare descending confidence vectors entry by entry;
/// a vector that runs out first loses; identical vectors fall back to
/// ascending entity id.
bool ranks_before(const RankedCandidate& a, const RankedCandidate& b);

/// Sorted candidates. With `filter` set, candidates forming a known triple
/// in any split are removed, except the query's own answer.
PredictionRanking rank(const CandidateMap& candidates, const Query& q, const TripleStore* filter);

/// Ranks of absent answers contribute 0.
double mrr(std::span<const std::optional<std::size_t>> ranks);
double hits_at(std::size_t k, std::span<const std::optional<std::size_t>> ranks);

/// Head and tail query for every test triple of the given targets, in test
/// order.
std::vector<Query> test_queries(const TripleStore& store, std::span<const RelationId> targets);

struct QueryResult {
    Query query;
    std::optional<std::size_t> rank;
    std::vector<RankedCandidate> top;  // at most 10
};

struct EvaluationOptions {
    std::size_t max_groundings = 1'000'000;
    unsigned threads = 1;
};

struct EvaluationResult {
    std::vector<QueryResult> results;
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits10 = 0.0;
    double rat_seconds = 0.0;  // suggest + filter + rank over all queries
};

using RuleBook = std::unordered_map<RelationId, std::vector<ScoredRule>>;

EvaluationResult evaluate_queries(const TripleStore& store, const RuleBook& rules, std::span<const Query> queries,
                                  const EvaluationOptions& opts = {});

/// `query TAB rank TAB top-10` lines; rank 0 means the answer was not ranked.
void write_predictions(std::ostream& out, const EvaluationResult& res, const Vocabulary& vocab);
void write_metrics(std::ostream& out, const EvaluationResult& res);

}  // namespace rulehier
