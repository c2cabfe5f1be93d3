#pragma once

// Rule quality over the train split: support, groundings, head coverage and
// standard confidence, plus the validation counts used by the overfitting
// filter.

#include <cstddef>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rulehier/rule.hpp"
#include "rulehier/triple_store.hpp"

namespace rulehier {

struct Measures {
    std::size_t supp = 0;
    std::size_t groundings = 0;  // |g(rule)|
    std::size_t valid_supp = 0;  // valid instances predicted by the rule
    double hc = 0.0;
    double sc = 0.0;
    bool approximate = false;  // grounding cap was hit
};

/// Per-target data shared by every rule evaluation.
class TargetContext {
public:
    TargetContext(const TripleStore& store, RelationId target);

    const TripleStore& store() const noexcept { return *store_; }
    RelationId target() const noexcept { return target_; }
    const std::vector<std::pair<EntityId, EntityId>>& train() const noexcept { return train_; }
    const std::vector<std::pair<EntityId, EntityId>>& valid() const noexcept { return valid_; }
    bool in_train(EntityId x, EntityId y) const { return train_set_.contains(pack(x, y)); }

    static std::uint64_t pack(EntityId x, EntityId y) {
        return (static_cast<std::uint64_t>(x) << 32) | y;
    }

private:
    const TripleStore* store_;
    RelationId target_;
    std::vector<std::pair<EntityId, EntityId>> train_;
    std::vector<std::pair<EntityId, EntityId>> valid_;
    std::unordered_set<std::uint64_t> train_set_;
};

struct MeasureConfig {
    double eta = 5.0;                       // confidence smoothing
    std::size_t max_groundings = 1'000'000;  // 0 = unlimited
};

/// Exact measures unless `approximate` is set. The top rule is computed in
/// closed form: supp = |R_t|, |g| = |E|^2, hc = 1.
Measures evaluate(const Rule& rule, const TargetContext& ctx, const MeasureConfig& cfg = {});

/// Support alone, by checking for each target instance whether the body has
/// a grounding agreeing with it. Never approximate.
std::size_t support(const Rule& rule, const TargetContext& ctx);

/// Fills hc and sc from supp and groundings.
void finish_measures(Measures& m, std::size_t target_size, double eta);

struct QualityThresholds {
    std::size_t supp = 3;
    double hc = 0.001;
    double sc = 0.001;
};

/// Strictly above every threshold.
bool is_relevant(const Measures& m, const QualityThresholds& t);

/// Keeps a rule when the share of its train support that reappears on the
/// valid split reaches `tau`. `tau == 0` keeps everything.
bool passes_overfit_filter(const Measures& m, double tau);

}  // namespace rulehier
