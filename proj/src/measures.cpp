#include "rulehier/measures.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "rulehier/grounding.hpp"

namespace rulehier {

namespace {

bool body_mentions(const Rule& rule, const Term& t) {
    for (const auto& a : rule.body())
        if (a.mentions(t)) return true;
    return false;
}

// Entities a free head variable may not take for one grounding: the bound
// body values plus the rule's constants, sorted.
std::vector<EntityId> used_values(std::span<const EntityId> values, std::span<const EntityId> constants) {
    std::vector<EntityId> u(constants.begin(), constants.end());
    for (EntityId v : values)
        if (v != kUnbound) u.push_back(v);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

void intersect_into(std::vector<EntityId>& acc, const std::vector<EntityId>& u) {
    std::vector<EntityId> out;
    std::set_intersection(acc.begin(), acc.end(), u.begin(), u.end(), std::back_inserter(out));
    acc.swap(out);
}

bool contains_sorted(const std::vector<EntityId>& v, EntityId e) {
    return std::binary_search(v.begin(), v.end(), e);
}

}  // namespace

TargetContext::TargetContext(const TripleStore& store, RelationId target)
    : store_(&store),
      target_(target),
      train_(store.instances_of(target, Split::Train)),
      valid_(store.instances_of(target, Split::Valid)) {
    train_set_.reserve(train_.size());
    for (auto [x, y] : train_) train_set_.insert(pack(x, y));
}

void finish_measures(Measures& m, std::size_t target_size, double eta) {
    m.hc = target_size == 0 ? 0.0 : double(m.supp) / double(target_size);
    m.sc = double(m.supp) / (eta + double(m.groundings));
}

Measures evaluate(const Rule& rule, const TargetContext& ctx, const MeasureConfig& cfg) {
    if (rule.target() != ctx.target()) throw std::invalid_argument("evaluate: rule head does not match target");
    Measures m;
    const auto& train = ctx.train();
    const auto& valid = ctx.valid();
    const std::size_t n_entities = ctx.store().num_entities();

    if (rule.is_top()) {
        m.supp = train.size();
        m.valid_supp = valid.size();
        m.groundings = n_entities * n_entities;
        finish_measures(m, train.size(), cfg.eta);
        return m;
    }

    const Atom& head = rule.head();
    const bool x_free = head.subject.is_var() && !body_mentions(rule, head.subject);
    const bool y_free = head.object.is_var() && !body_mentions(rule, head.object);
    const auto constants = rule.constants();
    Grounder grounder(ctx.store(), rule);
    auto head_value = [&](const Term& t, std::span<const EntityId> values) {
        return t.is_const() ? t.id : values[t.id];
    };

    Enumeration run;
    if (!x_free && !y_free) {
        std::unordered_set<std::uint64_t> pairs;
        run = grounder.enumerate(grounder.blank(), cfg.max_groundings, [&](std::span<const EntityId> values) {
            pairs.insert(TargetContext::pack(head_value(head.subject, values), head_value(head.object, values)));
            return true;
        });
        m.groundings = pairs.size();
        for (auto [x, y] : train) m.supp += pairs.contains(TargetContext::pack(x, y));
        for (auto [x, y] : valid) m.valid_supp += pairs.contains(TargetContext::pack(x, y));
    } else if (x_free != y_free) {
        // The free head variable ranges over every entity except those used
        // by all groundings sharing the determined head value.
        const Term& fixed = x_free ? head.object : head.subject;
        std::unordered_map<EntityId, std::vector<EntityId>> excluded;
        run = grounder.enumerate(grounder.blank(), cfg.max_groundings, [&](std::span<const EntityId> values) {
            auto u = used_values(values, constants);
            auto [it, fresh] = excluded.try_emplace(head_value(fixed, values));
            if (fresh)
                it->second = std::move(u);
            else
                intersect_into(it->second, u);
            return true;
        });
        for (const auto& [key, ex] : excluded) m.groundings += n_entities - ex.size();
        auto covered = [&](EntityId x, EntityId y) {
            auto it = excluded.find(x_free ? y : x);
            return it != excluded.end() && !contains_sorted(it->second, x_free ? x : y);
        };
        for (auto [x, y] : train) m.supp += covered(x, y);
        for (auto [x, y] : valid) m.valid_supp += covered(x, y);
    } else {
        // Body disconnected from both head variables: pairs avoiding the
        // values every grounding uses. Upper bound, so flagged approximate.
        std::vector<EntityId> common;
        bool any = false;
        run = grounder.enumerate(grounder.blank(), cfg.max_groundings, [&](std::span<const EntityId> values) {
            auto u = used_values(values, constants);
            if (!any)
                common = std::move(u);
            else
                intersect_into(common, u);
            any = true;
            return true;
        });
        if (any) {
            const std::size_t free_n = n_entities - common.size();
            m.groundings = free_n * (free_n > 0 ? free_n - 1 : 0);
            auto covered = [&](EntityId x, EntityId y) {
                return x != y && !contains_sorted(common, x) && !contains_sorted(common, y);
            };
            for (auto [x, y] : train) m.supp += covered(x, y);
            for (auto [x, y] : valid) m.valid_supp += covered(x, y);
            m.approximate = true;
        }
    }
    m.approximate = m.approximate || run.truncated;
    m.groundings = std::max(m.groundings, m.supp);
    finish_measures(m, train.size(), cfg.eta);
    return m;
}

std::size_t support(const Rule& rule, const TargetContext& ctx) {
    if (rule.target() != ctx.target()) throw std::invalid_argument("support: rule head does not match target");
    if (rule.is_top()) return ctx.train().size();
    const Atom& head = rule.head();
    Grounder grounder(ctx.store(), rule);
    std::size_t supp = 0;
    for (auto [x, y] : ctx.train()) {
        auto values = grounder.blank();
        if (head.subject.is_const()) {
            if (head.subject.id != x) continue;
        } else {
            values[head.subject.id] = x;
        }
        if (head.object.is_const()) {
            if (head.object.id != y) continue;
        } else {
            values[head.object.id] = y;
        }
        if (x == y) continue;
        supp += grounder.satisfiable(std::move(values));
    }
    return supp;
}

bool is_relevant(const Measures& m, const QualityThresholds& t) {
    return m.supp > t.supp && m.hc > t.hc && m.sc > t.sc;
}

bool passes_overfit_filter(const Measures& m, double tau) {
    if (tau <= 0.0) return true;
    if (m.supp == 0) return false;
    return double(m.valid_supp) / double(m.supp) >= tau;
}

}  // namespace rulehier
