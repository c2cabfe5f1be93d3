#include "rulehier/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ostream>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rulehier/grounding.hpp"

namespace rulehier {

namespace {

bool body_mentions(const Rule& rule, const Term& t) {
    for (const auto& a : rule.body())
        if (a.mentions(t)) return true;
    return false;
}

void suggest_one(const Query& q, const ScoredRule& sr, const TripleStore& store, std::size_t cap,
                 CandidateMap& out) {
    const Rule& rule = sr.rule;
    const Atom& head = rule.head();
    const bool tail_query = q.slot == QuerySlot::Tail;
    const Term& known_term = tail_query ? head.subject : head.object;
    const Term& open_term = tail_query ? head.object : head.subject;

    Grounder grounder(store, rule);
    auto values = grounder.blank();
    if (known_term.is_const()) {
        if (known_term.id != q.known) return;
    } else {
        values[known_term.id] = q.known;
    }

    if (open_term.is_const()) {
        if (open_term.id != q.known && grounder.satisfiable(std::move(values))) out[open_term.id].push_back(sr.sc);
        return;
    }
    if (!body_mentions(rule, open_term)) return;
    std::unordered_set<EntityId> seen;
    grounder.enumerate(std::move(values), cap, [&](std::span<const EntityId> vals) {
        seen.insert(vals[open_term.id]);
        return true;
    });
    for (EntityId e : seen) out[e].push_back(sr.sc);
}

}  // namespace

CandidateMap suggest(const Query& q, std::span<const ScoredRule> rules, const TripleStore& store,
                     std::size_t max_groundings) {
    CandidateMap out;
    for (const auto& r : rules)
        if (r.rule.target() == q.target) suggest_one(q, r, store, max_groundings, out);
    return out;
}

std::optional<std::size_t> PredictionRanking::rank_of(EntityId e) const {
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i].entity == e) return i + 1;
    return std::nullopt;
}

bool ranks_before(const RankedCandidate& a, const RankedCandidate& b) {
    const auto& va = a.confidences;
    const auto& vb = b.confidences;
    const std::size_t n = std::min(va.size(), vb.size());
    for (std::size_t i = 0; i < n; ++i)
        if (va[i] != vb[i]) return va[i] > vb[i];
    if (va.size() != vb.size()) return va.size() > vb.size();
    return a.entity < b.entity;
}

PredictionRanking rank(const CandidateMap& candidates, const Query& q, const TripleStore* filter) {
    PredictionRanking r;
    r.order.reserve(candidates.size());
    for (const auto& [e, conf] : candidates) {
        if (filter && e != q.answer && filter->contains_any(q.triple_for(e))) continue;
        RankedCandidate c{e, conf};
        std::sort(c.confidences.begin(), c.confidences.end(), std::greater<>());
        r.order.push_back(std::move(c));
    }
    std::sort(r.order.begin(), r.order.end(), ranks_before);
    return r;
}

double mrr(std::span<const std::optional<std::size_t>> ranks) {
    if (ranks.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : ranks)
        if (r) sum += 1.0 / double(*r);
    return sum / double(ranks.size());
}

double hits_at(std::size_t k, std::span<const std::optional<std::size_t>> ranks) {
    if (ranks.empty()) return 0.0;
    std::size_t n = 0;
    for (const auto& r : ranks) n += r && *r <= k;
    return double(n) / double(ranks.size());
}

std::vector<Query> test_queries(const TripleStore& store, std::span<const RelationId> targets) {
    std::unordered_set<RelationId> wanted(targets.begin(), targets.end());
    std::vector<Query> out;
    for (const Triple& t : store.triples(Split::Test)) {
        if (!wanted.contains(t.rel)) continue;
        out.push_back({t.rel, t.head, QuerySlot::Tail, t.tail});
        out.push_back({t.rel, t.tail, QuerySlot::Head, t.head});
    }
    return out;
}

EvaluationResult evaluate_queries(const TripleStore& store, const RuleBook& rules, std::span<const Query> queries,
                                  const EvaluationOptions& opts) {
    EvaluationResult res;
    res.results.resize(queries.size());
    const auto t0 = std::chrono::steady_clock::now();

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < queries.size(); i = next++) {
            const Query& q = queries[i];
            auto it = rules.find(q.target);
            CandidateMap cand;
            if (it != rules.end()) cand = suggest(q, it->second, store, opts.max_groundings);
            auto ranking = rank(cand, q, &store);
            QueryResult& out = res.results[i];
            out.query = q;
            out.rank = ranking.rank_of(q.answer);
            const std::size_t k = std::min<std::size_t>(10, ranking.order.size());
            out.top.assign(std::make_move_iterator(ranking.order.begin()),
                           std::make_move_iterator(ranking.order.begin() + k));
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(opts.threads, unsigned(queries.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    res.rat_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<std::optional<std::size_t>> ranks;
    ranks.reserve(res.results.size());
    for (const auto& r : res.results) ranks.push_back(r.rank);
    res.mrr = mrr(ranks);
    res.hits1 = hits_at(1, ranks);
    res.hits3 = hits_at(3, ranks);
    res.hits10 = hits_at(10, ranks);
    return res;
}

void write_predictions(std::ostream& out, const EvaluationResult& res, const Vocabulary& vocab) {
    for (const auto& r : res.results) {
        const auto& q = r.query;
        const auto& known = vocab.entities.name(q.known);
        const auto& rel = vocab.relations.name(q.target);
        if (q.slot == QuerySlot::Tail)
            fmt::print(out, "{}({},?)\t{}\t", rel, known, r.rank.value_or(0));
        else
            fmt::print(out, "{}(?,{})\t{}\t", rel, known, r.rank.value_or(0));
        for (std::size_t i = 0; i < r.top.size(); ++i) {
            const auto& c = r.top[i];
            fmt::print(out, "{}{}:{:.6f}", i ? " " : "", vocab.entities.name(c.entity),
                       c.confidences.empty() ? 0.0 : c.confidences.front());
        }
        out << '\n';
    }
}

void write_metrics(std::ostream& out, const EvaluationResult& res) {
    fmt::print(out, "queries = {}\n", res.results.size());
    fmt::print(out, "mrr = {:.6f}\n", res.mrr);
    fmt::print(out, "hits@1 = {:.6f}\n", res.hits1);
    fmt::print(out, "hits@3 = {:.6f}\n", res.hits3);
    fmt::print(out, "hits@10 = {:.6f}\n", res.hits10);
    fmt::print(out, "rat_seconds = {:.6f}\n", res.rat_seconds);
}

}  // namespace rulehier
