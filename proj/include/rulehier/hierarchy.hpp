#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rulehier/rule.hpp"

namespace rulehier {

enum class EdgeKind : std::uint8_t { Addition, Instantiation };

/// `parent` subsumes `child`; indices refer to Hierarchy::rule().
struct SubsumptionEdge {
    std::size_t parent;
    std::size_t child;
    EdgeKind kind;

    friend bool operator==(const SubsumptionEdge&, const SubsumptionEdge&) = default;
};

class Hierarchy {
public:
    /// Adds a node unless an equal rule is present; returns its index.
    std::size_t add_rule(const Rule& rule);
    std::optional<std::size_t> find(const Rule& rule) const;
    /// Returns false if the edge already exists.
    bool add_edge(std::size_t parent, std::size_t child, EdgeKind kind);

    std::size_t size() const noexcept { return rules_.size(); }
    const Rule& rule(std::size_t i) const { return rules_.at(i); }
    std::span<const Rule> rules() const noexcept { return rules_; }
    std::span<const SubsumptionEdge> edges() const noexcept { return edges_; }
    std::span<const std::size_t> children(std::size_t i) const { return children_.at(i); }
    std::span<const std::size_t> parents(std::size_t i) const { return parents_.at(i); }
    bool has_edge(std::size_t parent, std::size_t child) const;
    std::vector<std::size_t> roots() const;

    /// Rules with no sampled generalization that were hung under the top rule.
    std::size_t orphan_count() const noexcept { return orphans_; }
    void note_orphan() noexcept { ++orphans_; }

private:
    std::vector<Rule> rules_;
    std::unordered_map<Rule, std::size_t, RuleHash> index_;
    std::vector<SubsumptionEdge> edges_;
    std::unordered_set<std::uint64_t> edge_keys_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::vector<std::size_t>> parents_;
    std::size_t orphans_ = 0;
};

/// A-subsumption edges over `rules`. Each rule is linked to the rule
/// obtained by dropping its last body atom, which is the only possible
/// A-parent. With `attach_orphans`, non-top rules lacking that parent become
/// children of their predicate's top rule (when present).
Hierarchy build_a_hierarchy(std::span<const Rule> rules, bool attach_orphans = false);

/// I-subsumption edges over `rules`. Each rule is linked to the rules
/// obtained by turning one of its constants back into a variable.
Hierarchy build_i_hierarchy(std::span<const Rule> rules);

/// Node and edge union.
Hierarchy unite(const Hierarchy& a, const Hierarchy& b);

using Decider = std::function<bool(const Rule&, const Rule&)>;

bool is_acyclic(const Hierarchy& h);

/// True iff the edge set equals the transitive reduction of `decider`
/// evaluated over every ordered pair of nodes.
bool is_proper(const Hierarchy& h, const Decider& decider);

enum class Visit : std::uint8_t { Keep, PruneSubtree };

/// Breadth-first traversal from the roots. A node is visited once, and only
/// if it is a root or at least one of its parents was kept. Returns the kept
/// nodes in visit order. Throws std::logic_error on a cyclic hierarchy.
std::vector<std::size_t> bfs_with_pruning(const Hierarchy& h,
                                          const std::function<Visit(std::size_t)>& visit);

/// Graphviz digraph; A-edges solid, I-edges dashed.
void write_dot(std::ostream& out, const Hierarchy& h, const Vocabulary& vocab);

}  // namespace rulehier
