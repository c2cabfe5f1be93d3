#include "rulehier/miner.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "rulehier/grounding.hpp"

namespace rulehier {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

bool contains_sorted(const std::vector<EntityId>& v, EntityId e) {
    return std::binary_search(v.begin(), v.end(), e);
}

std::vector<EntityId> used_values(std::span<const EntityId> values) {
    std::vector<EntityId> u;
    for (EntityId v : values)
        if (v != kUnbound) u.push_back(v);
    std::sort(u.begin(), u.end());
    return u;
}

void intersect_into(std::vector<EntityId>& acc, const std::vector<EntityId>& u) {
    std::vector<EntityId> out;
    std::set_intersection(acc.begin(), acc.end(), u.begin(), u.end(), std::back_inserter(out));
    acc.swap(out);
}

std::uint64_t pack(EntityId a, EntityId b) { return TargetContext::pack(a, b); }

std::optional<std::uint32_t> dangling_var(const Rule& oar) {
    auto d = dangling_term(oar);
    if (!d || !d->is_var() || d->id < kFirstBodyVar) return std::nullopt;
    return d->id;
}

// Candidate constants for one OAR: HAR values of Y, and per HAR the BAR
// values of the dangling variable, both in first-seen order.
struct Candidates {
    std::vector<EntityId> hars;
    std::vector<std::vector<EntityId>> bars;  // parallel to hars
    std::unordered_map<EntityId, std::size_t> har_index;
    std::unordered_set<std::uint64_t> bar_set;  // pack(y, v)
    bool truncated = false;

    // Returns the HAR slot for y, or nullopt when capped out.
    std::optional<std::size_t> har(EntityId y, std::size_t cap) {
        auto it = har_index.find(y);
        if (it != har_index.end()) return it->second;
        if (cap != 0 && hars.size() >= cap) {
            truncated = true;
            return std::nullopt;
        }
        har_index.emplace(y, hars.size());
        hars.push_back(y);
        bars.emplace_back();
        return hars.size() - 1;
    }

    void bar(std::size_t slot, EntityId y, EntityId v, std::size_t cap) {
        if (bar_set.contains(pack(y, v))) return;
        if (cap != 0 && bars[slot].size() >= cap) {
            truncated = true;
            return;
        }
        bar_set.insert(pack(y, v));
        bars[slot].push_back(v);
    }
};

Rule make_har(const Rule& oar, EntityId y) {
    Binding b[] = {{kVarY, y}};
    return *instantiate(oar, b);
}

std::optional<Rule> make_bar(const Rule& oar, std::uint32_t dv, EntityId y, EntityId v) {
    Binding b[] = {{kVarY, y}, {dv, v}};
    return instantiate(oar, b);
}

// Candidates from groundings anchored at each target instance, each rule
// then evaluated independently.
Specialization specialize_generic(const Rule& oar, const TargetContext& ctx, const MinerConfig& cfg) {
    const auto dv = dangling_var(oar);
    const std::size_t cap = cfg.max_specializations;
    Grounder grounder(ctx.store(), oar);
    Candidates cand;
    bool approx = false;
    for (auto [x, y] : ctx.train()) {
        if (x == y) continue;
        auto values = grounder.blank();
        values[kVarX] = x;
        values[kVarY] = y;
        std::optional<std::size_t> slot;
        bool capped = false;
        auto run = grounder.enumerate(std::move(values), cfg.max_groundings, [&](std::span<const EntityId> vals) {
            if (!slot) {
                if (capped) return false;
                slot = cand.har(y, cap);
                if (!slot) {
                    capped = true;
                    return false;
                }
            }
            if (dv) cand.bar(*slot, y, vals[*dv], cap);
            return true;
        });
        approx = approx || run.truncated;
    }
    Specialization out;
    out.truncated = cand.truncated || approx;
    const auto mcfg = cfg.measure_config();
    for (std::size_t i = 0; i < cand.hars.size(); ++i) {
        Rule h = make_har(oar, cand.hars[i]);
        out.rules.push_back({h, evaluate(h, ctx, mcfg)});
        for (EntityId v : cand.bars[i]) {
            if (auto b = make_bar(oar, *dv, cand.hars[i], v)) out.rules.push_back({*b, evaluate(*b, ctx, mcfg)});
        }
    }
    return out;
}

// One grounding pass of the OAR body with X free. For every x we keep the
// intersection of the value sets of its groundings, overall and per value of
// the dangling variable. A constant c is usable for x exactly when it falls
// outside that intersection, which gives candidates, groundings and support
// of every HAR and BAR at once.
Specialization specialize_shared(const Rule& oar, std::uint32_t dv, const TargetContext& ctx,
                                 const MinerConfig& cfg) {
    struct PerX {
        std::vector<EntityId> inter;
        std::vector<std::pair<EntityId, std::vector<EntityId>>> by_v;
        std::unordered_map<EntityId, std::size_t> v_index;
    };
    std::unordered_map<EntityId, PerX> per_x;
    std::vector<EntityId> x_order;
    Grounder grounder(ctx.store(), oar);
    auto run = grounder.enumerate(grounder.blank(), cfg.max_groundings, [&](std::span<const EntityId> values) {
        auto u = used_values(values);
        const EntityId x = values[kVarX];
        const EntityId v = values[dv];
        auto [it, fresh] = per_x.try_emplace(x);
        PerX& px = it->second;
        if (fresh) {
            px.inter = u;
            x_order.push_back(x);
        } else {
            intersect_into(px.inter, u);
        }
        auto [vit, vfresh] = px.v_index.try_emplace(v, px.by_v.size());
        if (vfresh)
            px.by_v.emplace_back(v, std::move(u));
        else
            intersect_into(px.by_v[vit->second].second, u);
        return true;
    });

    const std::size_t cap = cfg.max_specializations;
    Candidates cand;
    for (auto [x, y] : ctx.train()) {
        if (x == y) continue;
        auto it = per_x.find(x);
        if (it == per_x.end() || contains_sorted(it->second.inter, y)) continue;
        auto slot = cand.har(y, cap);
        if (!slot) continue;
        for (const auto& [v, iv] : it->second.by_v)
            if (!contains_sorted(iv, y)) cand.bar(*slot, y, v, cap);
    }

    // Groundings: |g(HAR c)| = #x with c outside I_x, and
    // |g(BAR c,v)| = #x having v with c outside I_xv.
    std::unordered_map<EntityId, std::size_t> har_blocked;
    std::unordered_map<EntityId, std::size_t> v_count;
    std::unordered_map<std::uint64_t, std::size_t> bar_blocked;
    for (EntityId x : x_order) {
        const PerX& px = per_x.at(x);
        for (EntityId e : px.inter)
            if (cand.har_index.contains(e)) ++har_blocked[e];
        for (const auto& [v, iv] : px.by_v) {
            ++v_count[v];
            for (EntityId e : iv)
                if (cand.bar_set.contains(pack(e, v))) ++bar_blocked[pack(e, v)];
        }
    }

    std::unordered_map<EntityId, std::pair<std::size_t, std::size_t>> har_supp;  // train, valid
    std::unordered_map<std::uint64_t, std::pair<std::size_t, std::size_t>> bar_supp;
    auto tally = [&](const std::vector<std::pair<EntityId, EntityId>>& inst, bool valid) {
        for (auto [x, y] : inst) {
            auto it = per_x.find(x);
            if (it == per_x.end() || x == y) continue;
            const PerX& px = it->second;
            if (!cand.har_index.contains(y) || contains_sorted(px.inter, y)) continue;
            auto& hs = har_supp[y];
            ++(valid ? hs.second : hs.first);
            for (const auto& [v, iv] : px.by_v) {
                if (!cand.bar_set.contains(pack(y, v)) || contains_sorted(iv, y)) continue;
                auto& bs = bar_supp[pack(y, v)];
                ++(valid ? bs.second : bs.first);
            }
        }
    };
    tally(ctx.train(), false);
    tally(ctx.valid(), true);

    auto lookup = [](const auto& map, const auto& key) -> std::size_t {
        auto it = map.find(key);
        return it == map.end() ? 0 : it->second;
    };
    auto lookup_pair = [](const auto& map, const auto& key) -> std::pair<std::size_t, std::size_t> {
        auto it = map.find(key);
        return it == map.end() ? std::pair<std::size_t, std::size_t>{0, 0} : it->second;
    };

    Specialization out;
    out.truncated = cand.truncated || run.truncated;
    const std::size_t n_target = ctx.train().size();
    for (std::size_t i = 0; i < cand.hars.size(); ++i) {
        const EntityId c = cand.hars[i];
        Measures hm;
        std::tie(hm.supp, hm.valid_supp) = lookup_pair(har_supp, c);
        hm.groundings = per_x.size() - lookup(har_blocked, c);
        hm.approximate = run.truncated;
        finish_measures(hm, n_target, cfg.eta);
        out.rules.push_back({make_har(oar, c), hm});
        for (EntityId v : cand.bars[i]) {
            auto b = make_bar(oar, dv, c, v);
            if (!b) continue;
            Measures bm;
            std::tie(bm.supp, bm.valid_supp) = lookup_pair(bar_supp, pack(c, v));
            bm.groundings = lookup(v_count, v) - lookup(bar_blocked, pack(c, v));
            bm.approximate = run.truncated;
            finish_measures(bm, n_target, cfg.eta);
            out.rules.push_back({*b, bm});
        }
    }
    return out;
}

void check_oar(const Rule& oar) {
    if (oar.kind() != RuleKind::OAR) throw RuleError("specialization requires an OAR");
    if (oar.length() == 0) throw RuleError("the top rule cannot be specialized");
}

}  // namespace

void MinerConfig::validate() const {
    if (max_length == 0) throw std::invalid_argument("max_length must be at least 1");
    if (relevance.hc < 0 || relevance.sc < 0) throw std::invalid_argument("relevance thresholds must be non-negative");
    if (eta < 0) throw std::invalid_argument("eta must be non-negative");
    if (overfit_threshold < 0) throw std::invalid_argument("overfit threshold must be non-negative");
    if (gen_budget_seconds < 0 || spec_budget_seconds < 0) throw std::invalid_argument("time budgets must be non-negative");
}

std::string_view oar_class_name(OarClass c) {
    switch (c) {
        case OarClass::Pruned: return "P-OAR";
        case OarClass::Informative: return "I-OAR";
        case OarClass::Uninformative: return "U-OAR";
        case OarClass::Skipped: return "skipped";
    }
    return "?";
}

OarCounts& OarCounts::operator+=(const OarCounts& o) {
    pruned += o.pruned;
    informative += o.informative;
    uninformative += o.uninformative;
    skipped += o.skipped;
    return *this;
}

std::vector<Rule> TargetRun::relevant_rules() const {
    std::vector<Rule> out;
    for (const auto& r : rules) out.push_back(r.rule);
    for (const auto& r : post_pruned) out.push_back(r.rule);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Rule> generalization(const TripleStore& store, RelationId target, const MinerConfig& cfg,
                                 bool* budget_hit) {
    const auto instances = store.instances_of(target, Split::Train);
    if (instances.empty()) throw EmptyTargetError("target predicate has no train instance");
    const auto t0 = Clock::now();
    if (budget_hit) *budget_hit = false;

    std::vector<Rule> out;
    std::unordered_set<Rule, RuleHash> seen;
    auto add = [&](Rule r) {
        for (;;) {
            if (!seen.insert(r).second) return;
            out.push_back(r);
            if (r.length() == 0) return;
            r = drop_last_atom(r);
        }
    };
    add(Rule::top(target));

    for (std::size_t idx = 0; idx < instances.size(); ++idx) {
        if (cfg.gen_budget_seconds > 0 && seconds_since(t0) > cfg.gen_budget_seconds) {
            if (budget_hit) *budget_hit = true;
            break;
        }
        const auto [x, y] = instances[idx];
        if (x == y) continue;
        const Triple origin{target, x, y};
        std::mt19937_64 rng(splitmix(cfg.seed ^ splitmix(target) ^ splitmix(idx + 1)));
        for (std::size_t len = 1; len <= cfg.max_length; ++len) {
            for (std::size_t w = 0; w < cfg.walks_per_instance; ++w) {
                // Alternate the start between the head subject and object so
                // both X- and Y-anchored rules are sampled.
                Path path{origin, {}};
                EntityId cur = w % 2 == 0 ? x : y;
                bool ok = true;
                for (std::size_t step = 0; step < len && ok; ++step) {
                    auto nb = store.incident(cur);
                    std::uniform_int_distribution<std::size_t> pick(0, nb.empty() ? 0 : nb.size() - 1);
                    ok = false;
                    for (int tries = 0; tries < 8 && !nb.empty(); ++tries) {
                        const Neighbor& n = nb[pick(rng)];
                        Triple t = n.outgoing ? Triple{n.rel, cur, n.other} : Triple{n.rel, n.other, cur};
                        if (t == origin) continue;
                        path.body.push_back(t);
                        cur = n.other;
                        ok = true;
                        break;
                    }
                }
                if (!ok) continue;
                if (auto rule = generalize(path)) {
                    // A closed rule read from Y is the same chain read from X.
                    if (rule->kind() == RuleKind::CAR && !rule->body().front().mentions(Term::x()))
                        add(reverse_body(*rule));
                    else
                        add(*rule);
                }
            }
        }
    }
    return out;
}

std::vector<std::size_t> prior_pruning(const Hierarchy& phi_a, std::size_t supp_h,
                                       const std::function<std::size_t(const Rule&)>& supp, bool keep_cars) {
    auto kept = bfs_with_pruning(phi_a, [&](std::size_t i) {
        const Rule& r = phi_a.rule(i);
        if (keep_cars && r.kind() == RuleKind::CAR) return Visit::Keep;
        if (supp_h == kPruneEverything) return Visit::PruneSubtree;
        return supp(r) >= supp_h ? Visit::Keep : Visit::PruneSubtree;
    });
    if (keep_cars) {
        std::vector<bool> in(phi_a.size(), false);
        for (auto k : kept) in[k] = true;
        for (std::size_t i = 0; i < phi_a.size(); ++i)
            if (!in[i] && phi_a.rule(i).kind() == RuleKind::CAR) kept.push_back(i);
    }
    return kept;
}

Specialization specialization(const Rule& oar, const TargetContext& ctx, const MinerConfig& cfg) {
    check_oar(oar);
    const auto dv = dangling_var(oar);
    const bool x_anchored = oar.body().front().mentions(Term::x());
    if (dv && x_anchored) return specialize_shared(oar, *dv, ctx, cfg);
    return specialize_generic(oar, ctx, cfg);
}

Specialization specialization_reference(const Rule& oar, const TargetContext& ctx, const MinerConfig& cfg) {
    check_oar(oar);
    return specialize_generic(oar, ctx, cfg);
}

std::vector<std::size_t> post_pruning(const Hierarchy& phi_i, const std::function<double(std::size_t)>& sc) {
    std::vector<std::size_t> removed;
    for (std::size_t i = 0; i < phi_i.size(); ++i) {
        if (phi_i.rule(i).kind() != RuleKind::BAR) continue;
        for (auto p : phi_i.parents(i)) {
            if (phi_i.rule(p).kind() == RuleKind::HAR && sc(p) > sc(i)) {
                removed.push_back(i);
                break;
            }
        }
    }
    return removed;
}

bool keep_after_overfit(const MinedRule& r, const MinerConfig& cfg) {
    if (r.rule.kind() == RuleKind::CAR && !cfg.overfit_cars) return true;
    return passes_overfit_filter(r.measures, cfg.overfit_threshold);
}

TargetRun learn(const TripleStore& store, RelationId target, const MinerConfig& cfg,
                [[maybe_unused]] const LearnOptions& opts) {
    cfg.validate();
    TargetRun run;
    run.target = target;
    const TargetContext ctx(store, target);
    const auto mcfg = cfg.measure_config();

    auto t0 = Clock::now();
    const std::vector<Rule> L = generalization(store, target, cfg, &run.gen_budget_hit);
    run.abstract_rules = L.size();

    std::unordered_map<Rule, std::size_t, RuleHash> supp_cache;
    auto supp = [&](const Rule& r) {
        auto it = supp_cache.find(r);
        if (it != supp_cache.end()) return it->second;
        return supp_cache.emplace(r, support(r, ctx)).first->second;
    };

    std::vector<Rule> survivors;
#ifndef RULEHIER_BASELINE_ONLY
    Hierarchy phi_a = build_a_hierarchy(L, true);
    run.orphans = phi_a.orphan_count();
    for (auto k : prior_pruning(phi_a, cfg.supp_h, supp, !cfg.prior_prune_cars)) survivors.push_back(phi_a.rule(k));
    if (opts.keep_hierarchy) run.hierarchy = std::move(phi_a);
#else
    survivors = L;
#endif
    run.survivors = survivors.size();
    run.gen_seconds = seconds_since(t0);

    {
        std::unordered_set<Rule, RuleHash> alive(survivors.begin(), survivors.end());
        for (const auto& r : L)
            if (r.kind() == RuleKind::OAR && !r.is_top() && !alive.contains(r))
                run.oars.emplace_back(r, OarClass::Pruned);
    }

    std::erase_if(survivors, [](const Rule& r) { return r.is_top(); });
    std::vector<std::pair<std::size_t, Rule>> order;
    for (auto& r : survivors) order.emplace_back(supp(r), std::move(r));
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    t0 = Clock::now();
    for (const auto& [s, rule] : order) {
        if (cfg.spec_budget_seconds > 0 && seconds_since(t0) > cfg.spec_budget_seconds) {
            run.spec_budget_hit = true;
            if (rule.kind() == RuleKind::OAR) run.oars.emplace_back(rule, OarClass::Skipped);
            continue;
        }
        if (rule.kind() == RuleKind::CAR) {
            MinedRule m{rule, evaluate(rule, ctx, mcfg)};
            if (is_relevant(m.measures, cfg.relevance) && keep_after_overfit(m, cfg)) run.rules.push_back(std::move(m));
            continue;
        }
        if (rule.kind() != RuleKind::OAR) continue;

        Specialization spec = specialization(rule, ctx, cfg);
        run.truncated_oars += spec.truncated;
        std::vector<MinedRule> S;
        for (auto& m : spec.rules)
            if (is_relevant(m.measures, cfg.relevance) && keep_after_overfit(m, cfg)) S.push_back(std::move(m));
        if (S.empty()) {
            run.oars.emplace_back(rule, OarClass::Uninformative);
            continue;
        }
        run.oars.emplace_back(rule, OarClass::Informative);

#ifndef RULEHIER_BASELINE_ONLY
        if (cfg.post_prune || opts.keep_hierarchy) {
            std::vector<Rule> nodes{rule};
            for (const auto& m : S) nodes.push_back(m.rule);
            Hierarchy phi_i = build_i_hierarchy(nodes);
            if (cfg.post_prune) {
                // Node i > 0 is S[i - 1]; build_i keeps insertion order.
                auto removed = post_pruning(phi_i, [&](std::size_t i) { return i == 0 ? 0.0 : S[i - 1].measures.sc; });
                std::vector<bool> drop(S.size(), false);
                for (auto i : removed) drop[i - 1] = true;
                std::vector<MinedRule> kept;
                for (std::size_t i = 0; i < S.size(); ++i)
                    (drop[i] ? run.post_pruned : kept).push_back(std::move(S[i]));
                S = std::move(kept);
            }
            if (opts.keep_hierarchy) run.hierarchy = run.hierarchy ? unite(*run.hierarchy, phi_i) : std::move(phi_i);
        }
#endif
        for (auto& m : S) run.rules.push_back(std::move(m));
    }
    run.spec_seconds = seconds_since(t0);

    auto by_rule = [](const MinedRule& a, const MinedRule& b) { return a.rule < b.rule; };
    auto same_rule = [](const MinedRule& a, const MinedRule& b) { return a.rule == b.rule; };
    for (auto* v : {&run.rules, &run.post_pruned}) {
        std::sort(v->begin(), v->end(), by_rule);
        v->erase(std::unique(v->begin(), v->end(), same_rule), v->end());
    }
    std::sort(run.oars.begin(), run.oars.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return run;
}

OarCounts classify_oars(const TargetRun& run) {
    OarCounts c;
    for (const auto& [rule, cls] : run.oars) {
        switch (cls) {
            case OarClass::Pruned: ++c.pruned; break;
            case OarClass::Informative: ++c.informative; break;
            case OarClass::Uninformative: ++c.uninformative; break;
            case OarClass::Skipped: ++c.skipped; break;
        }
    }
    return c;
}

}  // namespace rulehier
