#include "rulehier/grounding.hpp"

namespace rulehier {

Grounder::Grounder(const TripleStore& store, Rule rule)
    : store_(store), rule_(std::move(rule)), constants_(rule_.constants()) {}

bool Grounder::consistent(std::span<const EntityId> values) const {
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (values[v] == kUnbound) continue;
        for (EntityId c : constants_)
            if (c == values[v]) return false;
        for (std::size_t w = v + 1; w < values.size(); ++w)
            if (values[w] == values[v]) return false;
    }
    return true;
}

// Greedy order: always ground next the atom with the most bound terms, so
// every atom after the first is reached through an index lookup.
std::vector<std::size_t> Grounder::plan(std::span<const EntityId> values) const {
    const auto body = rule_.body();
    std::vector<bool> bound(rule_.variable_count(), false);
    for (std::size_t v = 0; v < values.size(); ++v) bound[v] = values[v] != kUnbound;
    auto is_bound = [&](const Term& t) { return t.is_const() || bound[t.id]; };

    std::vector<std::size_t> order;
    std::vector<bool> used(body.size(), false);
    while (order.size() < body.size()) {
        std::size_t best = body.size();
        int best_score = -1;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (used[i]) continue;
            int score = int(is_bound(body[i].subject)) + int(is_bound(body[i].object));
            if (score > best_score) {
                best = i;
                best_score = score;
            }
        }
        used[best] = true;
        order.push_back(best);
        for (const Term& t : {body[best].subject, body[best].object})
            if (t.is_var()) bound[t.id] = true;
    }
    return order;
}

}  // namespace rulehier
