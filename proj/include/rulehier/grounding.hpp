#pragma once

// Depth-first enumeration of body groundings over the train split under
// object identity: distinct variables take distinct entities, and no
// variable takes one of the rule's constants.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "rulehier/rule.hpp"
#include "rulehier/triple_store.hpp"

namespace rulehier {

inline constexpr EntityId kUnbound = std::numeric_limits<EntityId>::max();

struct Enumeration {
    std::size_t groundings = 0;
    bool truncated = false;
    bool stopped = false;
};

class Grounder {
public:
    Grounder(const TripleStore& store, Rule rule);

    const Rule& rule() const noexcept { return rule_; }

    /// Assignment vector sized for this rule with every variable unbound.
    std::vector<EntityId> blank() const { return std::vector<EntityId>(rule_.variable_count(), kUnbound); }

    /// True if the bound entries of `values` respect object identity.
    bool consistent(std::span<const EntityId> values) const;

    /// Calls `fn(values)` for every complete grounding extending `values`.
    /// `fn` returns false to stop early. At most `cap` groundings are
    /// reported (0 = unlimited); `truncated` is set if more exist.
    template <class Fn>
    Enumeration enumerate(std::vector<EntityId> values, std::size_t cap, Fn&& fn) const {
        Enumeration result;
        if (values.size() != rule_.variable_count() || !consistent(values)) return result;
        auto order = plan(values);
        step(order, 0, values, cap, fn, result);
        return result;
    }

    /// True if at least one grounding extends `values`.
    bool satisfiable(std::vector<EntityId> values) const {
        bool found = false;
        enumerate(std::move(values), 0, [&](std::span<const EntityId>) {
            found = true;
            return false;
        });
        return found;
    }

private:
    std::vector<std::size_t> plan(std::span<const EntityId> values) const;

    bool admissible(std::uint32_t var, EntityId e, std::span<const EntityId> values) const {
        for (EntityId c : constants_)
            if (c == e) return false;
        for (std::size_t v = 0; v < values.size(); ++v)
            if (v != var && values[v] == e) return false;
        return true;
    }

    EntityId resolve(const Term& t, std::span<const EntityId> values) const {
        return t.is_const() ? t.id : values[t.id];
    }

    // Returns false when the enumeration must stop.
    template <class Fn>
    bool step(const std::vector<std::size_t>& order, std::size_t k, std::vector<EntityId>& values,
              std::size_t cap, Fn& fn, Enumeration& result) const {
        if (k == order.size()) {
            if (cap != 0 && result.groundings == cap) {
                result.truncated = true;
                return false;
            }
            ++result.groundings;
            if (!fn(std::span<const EntityId>(values))) {
                result.stopped = true;
                return false;
            }
            return true;
        }
        const Atom& a = rule_.body()[order[k]];
        const EntityId s = resolve(a.subject, values);
        const EntityId o = resolve(a.object, values);

        auto bind_and_recurse = [&](const Term& t, EntityId e) {
            if (!admissible(t.id, e, values)) return true;
            values[t.id] = e;
            bool go = step(order, k + 1, values, cap, fn, result);
            values[t.id] = kUnbound;
            return go;
        };

        if (s != kUnbound && o != kUnbound) {
            if (!store_.has_train(a.pred, s, o)) return true;
            return step(order, k + 1, values, cap, fn, result);
        }
        if (s != kUnbound) {
            for (EntityId e : store_.objects(a.pred, s))
                if (!bind_and_recurse(a.object, e)) return false;
            return true;
        }
        if (o != kUnbound) {
            for (EntityId e : store_.subjects(a.pred, o))
                if (!bind_and_recurse(a.subject, e)) return false;
            return true;
        }
        const bool same_var = a.subject == a.object;
        for (const Triple& t : store_.train_by_relation(a.pred)) {
            if (same_var) {
                if (t.head != t.tail) continue;
                if (!bind_and_recurse(a.subject, t.head)) return false;
                continue;
            }
            if (t.head == t.tail || !admissible(a.subject.id, t.head, values)) continue;
            values[a.subject.id] = t.head;
            bool go = bind_and_recurse(a.object, t.tail);
            values[a.subject.id] = kUnbound;
            if (!go) return false;
        }
        return true;
    }

    const TripleStore& store_;
    Rule rule_;
    std::vector<EntityId> constants_;
};

}  // namespace rulehier
