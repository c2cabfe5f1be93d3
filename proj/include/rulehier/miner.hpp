#pragma once

// Rule learning for one target predicate: sample and generalize walks, prune
// abstract rules top-down over the A-hierarchy, specialize the surviving
// OARs, and prune dominated BARs over the I-hierarchy.
//
// Building with RULEHIER_BASELINE_ONLY removes both pruning stages.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rulehier/hierarchy.hpp"
#include "rulehier/measures.hpp"
#include "rulehier/rule.hpp"
#include "rulehier/triple_store.hpp"

namespace rulehier {

class EmptyTargetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kNoPriorPruning = 0;
inline constexpr std::size_t kPruneEverything = std::numeric_limits<std::size_t>::max();

struct MinerConfig {
    std::size_t max_length = 3;
    QualityThresholds relevance{};
    std::size_t supp_h = 10;  // prior threshold; 0 disables prior pruning
    bool post_prune = true;
    bool prior_prune_cars = true;
    double eta = 5.0;
    double overfit_threshold = 0.1;
    bool overfit_cars = true;  // false restricts the filter to instantiated rules
    std::size_t walks_per_instance = 10;
    double gen_budget_seconds = 0.0;   // 0 = unconstrained
    double spec_budget_seconds = 0.0;  // 0 = unconstrained
    std::size_t max_groundings = 1'000'000;  // 0 = unlimited
    std::size_t max_specializations = 0;     // per OAR; 0 = unlimited
    std::uint64_t seed = 42;

    /// Throws std::invalid_argument on a negative threshold or max_length 0.
    void validate() const;
    MeasureConfig measure_config() const { return {eta, max_groundings}; }
};

struct MinedRule {
    Rule rule;
    Measures measures;
};

enum class OarClass : std::uint8_t { Pruned, Informative, Uninformative, Skipped };
std::string_view oar_class_name(OarClass c);

struct OarCounts {
    std::size_t pruned = 0;
    std::size_t informative = 0;
    std::size_t uninformative = 0;
    std::size_t skipped = 0;  // survived pruning but not reached within the specialization budget

    std::size_t total() const noexcept { return pruned + informative + uninformative + skipped; }
    OarCounts& operator+=(const OarCounts& o);
    friend bool operator==(const OarCounts&, const OarCounts&) = default;
};

/// Everything a single-target run produces.
struct TargetRun {
    RelationId target = 0;
    std::vector<MinedRule> rules;  // F, sorted by rule
    std::vector<std::pair<Rule, OarClass>> oars;
    std::vector<MinedRule> post_pruned;  // relevant BARs removed by post pruning
    std::size_t abstract_rules = 0;      // |L|
    std::size_t survivors = 0;           // |L'|
    std::size_t orphans = 0;
    std::size_t truncated_oars = 0;      // specialization hit a cap
    double gen_seconds = 0.0;
    double spec_seconds = 0.0;
    bool gen_budget_hit = false;
    bool spec_budget_hit = false;
    std::optional<Hierarchy> hierarchy;  // union of all built hierarchies, on request

    /// Relevant rules before post pruning.
    std::vector<Rule> relevant_rules() const;
};

/// Abstract rules from random walks; always includes the top rule. Throws
/// EmptyTargetError if the target has no train instance.
std::vector<Rule> generalization(const TripleStore& store, RelationId target, const MinerConfig& cfg,
                                 bool* budget_hit = nullptr);

/// BFS over Φa keeping a node iff supp >= supp_h. Returns kept node indices
/// in visit order. With `keep_cars`, CAR nodes never cut their subtree and
/// are always returned.
std::vector<std::size_t> prior_pruning(const Hierarchy& phi_a, std::size_t supp_h,
                                       const std::function<std::size_t(const Rule&)>& supp,
                                       bool keep_cars = false);

struct Specialization {
    std::vector<MinedRule> rules;  // HARs first-seen order, each followed by its BARs
    bool truncated = false;
};

/// HARs and BARs of `oar` with their measures. X-anchored OARs share one
/// grounding pass; other shapes are evaluated rule by rule. Throws
/// RuleError for a non-OAR.
Specialization specialization(const Rule& oar, const TargetContext& ctx, const MinerConfig& cfg);

/// Same candidates as specialization(), each evaluated on its own.
Specialization specialization_reference(const Rule& oar, const TargetContext& ctx, const MinerConfig& cfg);

/// Node indices of BARs in `phi_i` that have an HAR parent with strictly
/// greater sc.
std::vector<std::size_t> post_pruning(const Hierarchy& phi_i, const std::function<double(std::size_t)>& sc);

/// Overfitting filter under `cfg` for a rule of the given kind.
bool keep_after_overfit(const MinedRule& r, const MinerConfig& cfg);

struct LearnOptions {
    bool keep_hierarchy = false;
};

/// End-to-end mining for `target`.
TargetRun learn(const TripleStore& store, RelationId target, const MinerConfig& cfg,
                const LearnOptions& opts = {});

OarCounts classify_oars(const TargetRun& run);

/// True when the library was built without the pruning stages.
constexpr bool baseline_only() {
#ifdef RULEHIER_BASELINE_ONLY
    return true;
#else
    return false;
#endif
}

}  // namespace rulehier
