#include <gtest/gtest.h>

#include "rulehier/grounding.hpp"
#include "rulehier/measures.hpp"
#include "rulehier/miner.hpp"
#include "rulehier/rule_io.hpp"
#include "support/generators.hpp"

using namespace rulehier;

namespace {

class MeasuresTest : public ::testing::Test {
protected:
    void add(const char* h, const char* r, const char* t, Split s = Split::Train) { store.add(h, r, t, s); }
    Rule r(const std::string& text) { return parse_rule(text, store.vocabulary()); }
    RelationId rel(const char* name) { return *store.vocabulary().relations.find(name); }
    TripleStore store;
};

struct Expected {
    std::size_t supp = 0, groundings = 0, valid_supp = 0;
};

Expected brute_measures(const Rule& rule, const TripleStore& store) {
    auto pairs = gen::brute_head_pairs(rule, store);
    Expected out;
    out.groundings = pairs.size();
    for (auto [x, y] : store.instances_of(rule.target(), Split::Train)) out.supp += pairs.count({x, y});
    for (auto [x, y] : store.instances_of(rule.target(), Split::Valid)) out.valid_supp += pairs.count({x, y});
    return out;
}

}  // namespace

TEST_F(MeasuresTest, SharedNeighbourExample) {
    add("a", "t", "b");
    add("a", "r0", "c");
    add("b", "r0", "c");
    TargetContext ctx(store, rel("t"));
    auto m = evaluate(r("t(X,Y) <- r0(X,V0), r0(Y,V0)"), ctx);
    EXPECT_EQ(m.supp, 1u);
    EXPECT_EQ(m.groundings, 2u);
    EXPECT_DOUBLE_EQ(m.hc, 1.0);
    EXPECT_DOUBLE_EQ(m.sc, 1.0 / 7.0);
    EXPECT_FALSE(m.approximate);
}

TEST_F(MeasuresTest, TopRuleClosedForm) {
    add("a", "t", "b");
    add("b", "t", "c", Split::Valid);
    add("c", "r", "d");
    TargetContext ctx(store, rel("t"));
    auto m = evaluate(Rule::top(rel("t")), ctx);
    EXPECT_EQ(m.supp, 1u);
    EXPECT_EQ(m.groundings, 16u);
    EXPECT_EQ(m.valid_supp, 1u);
    EXPECT_DOUBLE_EQ(m.hc, 1.0);
    EXPECT_DOUBLE_EQ(m.sc, 1.0 / 21.0);
}

TEST_F(MeasuresTest, RelevanceIsStrict) {
    Measures m;
    m.supp = 3;
    m.hc = 0.5;
    m.sc = 0.5;
    EXPECT_FALSE(is_relevant(m, QualityThresholds{}));
    m.supp = 4;
    EXPECT_TRUE(is_relevant(m, QualityThresholds{}));
    m.sc = 0.001;
    EXPECT_FALSE(is_relevant(m, QualityThresholds{}));
}

TEST_F(MeasuresTest, OverfitFilter) {
    Measures m;
    m.supp = 10;
    m.valid_supp = 1;
    EXPECT_TRUE(passes_overfit_filter(m, 0.1));
    m.valid_supp = 0;
    EXPECT_FALSE(passes_overfit_filter(m, 0.1));
    EXPECT_TRUE(passes_overfit_filter(m, 0.0));
    m.supp = 0;
    EXPECT_FALSE(passes_overfit_filter(m, 0.1));
}

TEST_F(MeasuresTest, GrounderRespectsObjectIdentity) {
    add("a", "r", "a");
    add("a", "r", "b");
    add("b", "r", "a");
    Grounder g(store, r("t(X,Y) <- r(X,V0), r(V0,V1)"));
    std::size_t n = 0;
    g.enumerate(g.blank(), 0, [&](std::span<const EntityId> v) {
        EXPECT_NE(v[kVarX], v[kFirstBodyVar]);
        EXPECT_NE(v[kFirstBodyVar], v[kFirstBodyVar + 1]);
        EXPECT_NE(v[kVarX], v[kFirstBodyVar + 1]);
        ++n;
        return true;
    });
    EXPECT_EQ(n, 0u);  // a-b-a would reuse a
    Grounder loop(store, r("t(X,Y) <- r(X,X)"));
    EXPECT_TRUE(loop.satisfiable(loop.blank()));
}

TEST_F(MeasuresTest, GrounderCapTruncates) {
    for (int i = 0; i < 10; ++i) add("a", "r", ("b" + std::to_string(i)).c_str());
    Grounder g(store, r("t(X,Y) <- r(X,V0)"));
    auto full = g.enumerate(g.blank(), 0, [](auto) { return true; });
    EXPECT_EQ(full.groundings, 10u);
    EXPECT_FALSE(full.truncated);
    auto capped = g.enumerate(g.blank(), 4, [](auto) { return true; });
    EXPECT_EQ(capped.groundings, 4u);
    EXPECT_TRUE(capped.truncated);
    auto exact = g.enumerate(g.blank(), 10, [](auto) { return true; });
    EXPECT_FALSE(exact.truncated);
}

TEST_F(MeasuresTest, CapMarksApproximate) {
    add("a", "t", "b");
    for (int i = 0; i < 10; ++i) add("a", "r", ("b" + std::to_string(i)).c_str());
    TargetContext ctx(store, rel("t"));
    auto m = evaluate(r("t(X,Y) <- r(X,V0)"), ctx, MeasureConfig{5.0, 3});
    EXPECT_TRUE(m.approximate);
    EXPECT_FALSE(evaluate(r("t(X,Y) <- r(X,V0)"), ctx).approximate);
}

TEST_F(MeasuresTest, WrongTargetThrows) {
    add("a", "t", "b");
    add("a", "r", "b");
    TargetContext ctx(store, rel("t"));
    EXPECT_THROW(evaluate(Rule::top(rel("r")), ctx), std::invalid_argument);
}

TEST(MeasuresOracle, RandomRulesMatchBruteForce) {
    gen::Rng rng(13);
    std::size_t compared = 0, nonzero = 0;
    for (int round = 0; round < 40; ++round) {
        auto store = gen::random_kg(rng, gen::KgShape{8, 3, 24, 2, 0.15, 0.15});
        TargetContext ctx(store, 0);
        if (ctx.train().empty()) continue;
        MinerConfig cfg;
        cfg.seed = round;
        cfg.max_length = 3;
        auto rules = generalization(store, 0, cfg);
        gen::RuleShape shape{3, static_cast<std::uint32_t>(store.num_relations()),
                             static_cast<std::uint32_t>(store.num_entities()), 0.3, 0.3};
        for (int i = 0; i < 30; ++i) rules.push_back(gen::random_rule(rng, shape));
        for (const Rule& rule : rules) {
            if (rule.is_top()) continue;
            auto m = evaluate(rule, ctx, MeasureConfig{5.0, 0});
            if (m.approximate) continue;
            ASSERT_EQ(m.supp, support(rule, ctx)) << format_rule(rule, store.vocabulary());
            auto want = brute_measures(rule, store);
            ASSERT_EQ(m.supp, want.supp) << format_rule(rule, store.vocabulary());
            ASSERT_EQ(m.groundings, want.groundings) << format_rule(rule, store.vocabulary());
            ASSERT_EQ(m.valid_supp, want.valid_supp) << format_rule(rule, store.vocabulary());
            ASSERT_DOUBLE_EQ(m.sc, double(want.supp) / (5.0 + double(want.groundings)));
            ++compared;
            nonzero += m.supp > 0;
        }
    }
    EXPECT_GT(compared, 500u);
    EXPECT_GT(nonzero, 50u);
}

TEST(MeasuresOracle, ApproximateIsUpperBound) {
    gen::Rng rng(77);
    for (int round = 0; round < 30; ++round) {
        auto store = gen::random_kg(rng, gen::KgShape{7, 2, 16, 2, 0.1, 0.1});
        TargetContext ctx(store, 0);
        gen::RuleShape shape{2, static_cast<std::uint32_t>(store.num_relations()),
                             static_cast<std::uint32_t>(store.num_entities()), 0.6, 0.0};
        for (int i = 0; i < 40; ++i) {
            Rule rule = gen::random_rule(rng, shape);
            if (rule.is_top()) continue;
            auto m = evaluate(rule, ctx, MeasureConfig{5.0, 0});
            if (!m.approximate) continue;
            auto want = brute_measures(rule, store);
            EXPECT_GE(m.groundings, want.groundings);
            EXPECT_GE(m.supp, want.supp);
            EXPECT_EQ(want.supp, support(rule, ctx));
        }
    }
}
