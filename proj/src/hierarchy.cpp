#include "rulehier/hierarchy.hpp"

#include <deque>
#include <ostream>
#include <stdexcept>

#include "rulehier/rule_io.hpp"
#include "rulehier/subsumption.hpp"

namespace rulehier {

namespace {

std::uint64_t edge_key(std::size_t parent, std::size_t child) {
    return (static_cast<std::uint64_t>(parent) << 32) | static_cast<std::uint64_t>(child);
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::size_t Hierarchy::add_rule(const Rule& rule) {
    auto [it, fresh] = index_.emplace(rule, rules_.size());
    if (fresh) {
        rules_.push_back(rule);
        children_.emplace_back();
        parents_.emplace_back();
    }
    return it->second;
}

std::optional<std::size_t> Hierarchy::find(const Rule& rule) const {
    auto it = index_.find(rule);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool Hierarchy::add_edge(std::size_t parent, std::size_t child, EdgeKind kind) {
    if (parent >= size() || child >= size()) throw std::out_of_range("edge endpoint out of range");
    if (!edge_keys_.insert(edge_key(parent, child)).second) return false;
    edges_.push_back({parent, child, kind});
    children_[parent].push_back(child);
    parents_[child].push_back(parent);
    return true;
}

bool Hierarchy::has_edge(std::size_t parent, std::size_t child) const {
    return edge_keys_.contains(edge_key(parent, child));
}

std::vector<std::size_t> Hierarchy::roots() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
        if (parents_[i].empty()) out.push_back(i);
    return out;
}

Hierarchy build_a_hierarchy(std::span<const Rule> rules, bool attach_orphans) {
    Hierarchy h;
    for (const auto& r : rules) h.add_rule(r);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const Rule& q = h.rule(i);
        if (q.length() == 0) continue;
        const Rule prefix = drop_last_atom(q);
        auto p = h.find(prefix);
        if (p && a_subsumes(h.rule(*p), q)) {
            h.add_edge(*p, i, EdgeKind::Addition);
        } else if (attach_orphans && !q.is_top()) {
            if (auto top = h.find(Rule::top(q.target()))) {
                h.add_edge(*top, i, EdgeKind::Addition);
                h.note_orphan();
            }
        }
    }
    return h;
}

Hierarchy build_i_hierarchy(std::span<const Rule> rules) {
    Hierarchy h;
    for (const auto& r : rules) h.add_rule(r);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const Rule& q = h.rule(i);
        for (EntityId c : q.constants()) {
            auto p = h.find(variabilize(q, c));
            if (p && i_subsumes(h.rule(*p), q)) h.add_edge(*p, i, EdgeKind::Instantiation);
        }
    }
    return h;
}

Hierarchy unite(const Hierarchy& a, const Hierarchy& b) {
    Hierarchy h;
    for (const Hierarchy* src : {&a, &b}) {
        std::vector<std::size_t> map;
        map.reserve(src->size());
        for (const auto& r : src->rules()) map.push_back(h.add_rule(r));
        for (const auto& e : src->edges()) h.add_edge(map[e.parent], map[e.child], e.kind);
        for (std::size_t k = 0; k < src->orphan_count(); ++k) h.note_orphan();
    }
    return h;
}

bool is_acyclic(const Hierarchy& h) {
    std::vector<std::size_t> indegree(h.size());
    for (const auto& e : h.edges()) ++indegree[e.child];
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (indegree[i] == 0) ready.push_back(i);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto n = ready.front();
        ready.pop_front();
        ++seen;
        for (auto c : h.children(n))
            if (--indegree[c] == 0) ready.push_back(c);
    }
    return seen == h.size();
}

bool is_proper(const Hierarchy& h, const Decider& decider) {
    const std::size_t n = h.size();
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) rel[i][j] = decider(h.rule(i), h.rule(j));

    std::size_t reduced = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!rel[i][j]) continue;
            bool implied = false;
            for (std::size_t k = 0; k < n && !implied; ++k)
                implied = k != i && k != j && rel[i][k] && rel[k][j];
            if (implied) continue;
            if (!h.has_edge(i, j)) return false;
            ++reduced;
        }
    }
    return reduced == h.edges().size();
}

std::vector<std::size_t> bfs_with_pruning(const Hierarchy& h,
                                          const std::function<Visit(std::size_t)>& visit) {
    if (!is_acyclic(h)) throw std::logic_error("bfs_with_pruning: hierarchy has a cycle");
    std::vector<bool> queued(h.size(), false);
    std::deque<std::size_t> queue;
    for (auto r : h.roots()) {
        queued[r] = true;
        queue.push_back(r);
    }
    std::vector<std::size_t> kept;
    while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        if (visit(n) == Visit::PruneSubtree) continue;
        kept.push_back(n);
        for (auto c : h.children(n)) {
            if (!queued[c]) {
                queued[c] = true;
                queue.push_back(c);
            }
        }
    }
    return kept;
}

void write_dot(std::ostream& out, const Hierarchy& h, const Vocabulary& vocab) {
    out << "digraph hierarchy {\n  node [shape=box];\n";
    for (std::size_t i = 0; i < h.size(); ++i)
        out << "  n" << i << " [label=\"" << dot_escape(format_rule(h.rule(i), vocab)) << "\"];\n";
    for (const auto& e : h.edges()) {
        out << "  n" << e.parent << " -> n" << e.child << " [style="
            << (e.kind == EdgeKind::Addition ? "solid" : "dashed") << "];\n";
    }
    out << "}\n";
}

}  // namespace rulehier
