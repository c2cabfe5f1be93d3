// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exits non-zero
// when a gating criterion fails.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "rulehier/evaluator.hpp"
#include "rulehier/hierarchy.hpp"
#include "rulehier/measures.hpp"
#include "rulehier/miner.hpp"
#include "rulehier/rule_io.hpp"
#include "rulehier/subsumption.hpp"
#include "support/generators.hpp"

using namespace rulehier;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status = Status::Pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

TripleStore small_kg(gen::Rng& rng, std::size_t max_triples, std::size_t entities, std::size_t base) {
    for (;;) {
        gen::KgShape shape{gen::uniform(rng, entities / 2, entities), gen::uniform(rng, 2, 4),
                           gen::uniform(rng, base / 2, base), gen::uniform(rng, 2, 4), 0.15, 0.15};
        auto store = gen::random_kg(rng, shape);
        if (store.size() <= max_triples && !store.triples(Split::Train).empty() &&
            !TargetContext(store, 0).train().empty())
            return store;
    }
}

MinerConfig exact_config(std::uint64_t seed) {
    MinerConfig cfg;
    cfg.seed = seed;
    cfg.max_length = 2;
    cfg.walks_per_instance = 6;
    cfg.max_groundings = 0;
    return cfg;
}

Outcome equivalence() {
    const auto t0 = Clock::now();
    gen::Rng rng(1001);
    gen::RuleShape shape{4, 5, 6, 0.25, 0.3};
    std::size_t pairs = 0, positives = 0, discrepancies = 0, violations = 0;
    while (pairs < 10000) {
        Rule q = gen::random_rule(rng, shape);
        Rule p = gen::coin(rng) ? gen::random_generalization(rng, q) : gen::random_rule(rng, shape);
        if (!is_connected(p) || !is_connected(q) || !is_straight(p) || !is_straight(q)) continue;
        ++pairs;
        const bool oi = oi_subsumes(p, q);
        positives += oi;
        discrepancies += sa_subsumes_complete(p, q) != oi;
        violations += (sa_subsumes(p, q) && !oi) || (oi && !theta_subsumes(p, q));
    }
    const double secs = since(t0);
    Outcome o;
    o.detail = fmt::format("{} pairs ({} OI-positive), {} discrepancies, {} chain violations, {:.1f} s", pairs,
                           positives, discrepancies, violations, secs);
    if (discrepancies || violations || secs >= 60.0) o.status = Status::Fail;
    return o;
}

Outcome worked_examples() {
    Vocabulary v;
    auto r = [&](const char* text) { return parse_rule(text, v); };
    std::vector<std::string> failures;
    auto check = [&](bool ok, const char* what) {
        if (!ok) failures.emplace_back(what);
    };

    // The open rule whose atom sits on the object side is the one that
    // instantiates to Is_A(Y,student); the subject-side form cannot.
    auto p5 = r("Advises(X,Y) <- Is_A(Y,V1)");
    auto p5_subject = r("Advises(X,Y) <- Is_A(X,V1)");
    auto p6 = r("Advises(X,Y) <- Is_A(Y,student)");
    check(theta_subsumes(p5, p6), "theta(p5,p6)");

    auto p4 = r("Advises(X,Y) <- Publishes(X,V0), Publishes(Y,V0)");
    auto p7 = r("Advises(X,Y) <-");
    auto p8 = r("Advises(X,Y) <- Publishes(X,V0)");
    std::vector<Rule> three{p4, p7, p8};
    std::set<std::pair<std::size_t, std::size_t>> oi_pairs;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j && oi_subsumes(three[i], three[j])) oi_pairs.emplace(i, j);
    check(oi_pairs == std::set<std::pair<std::size_t, std::size_t>>{{2, 0}, {1, 2}, {1, 0}}, "OI order on p4,p7,p8");
    auto ha = build_a_hierarchy(three);
    std::set<std::pair<Rule, Rule>> a_edges;
    for (const auto& e : ha.edges()) a_edges.emplace(ha.rule(e.parent), ha.rule(e.child));
    check(a_edges == std::set<std::pair<Rule, Rule>>{{p7, p8}, {p8, p4}}, "A-hierarchy on p4,p7,p8");

    auto p9 = r("r_t(X,Y) <- r0(X,V0)");
    auto p10 = r("r_t(X,Y) <- r1(X,V0), r0(V0,V1), r0(V1,V2)");
    std::vector<EliminationStep> trace;
    check(!oi_subsumes(p9, p10, &trace), "oi(p9,p10) false");
    check(trace == std::vector<EliminationStep>{{0, 0, true}, {1, 2, false}, {1, 3, false}}, "p9/p10 trace");

    auto p11 = r("r_t(X,Y) <- r0(Y,V0), r0(X,V0)");
    check(oi_subsumes(p9, p11) && !sa_subsumes(p9, p11) && sa_subsumes(p9, reverse_body(p11)) &&
              sa_subsumes_complete(p9, p11),
          "p9/p11 only through the reversed body");

    Outcome o;
    if (!failures.empty()) {
        o.status = Status::Fail;
        for (const auto& f : failures) o.detail += f + "; ";
        o.detail += "failed";
    } else {
        o.detail = fmt::format(
            "theta(p5,p6) with p5 = {} (subject-side p5 gives {}); OI and A hierarchies; p9/p10 trace; p9/p11 reversal",
            format_rule(p5, v), theta_subsumes(p5_subject, p6));
    }
    return o;
}

Outcome properness() {
    const auto t0 = Clock::now();
    gen::Rng rng(3003);
    std::size_t bad = 0, edges = 0, largest = 0;
    for (int round = 0; round < 1000; ++round) {
        auto rules = gen::random_rule_set(rng, 50);
        largest = std::max(largest, rules.size());
        auto u = unite(build_a_hierarchy(rules), build_i_hierarchy(rules));
        std::vector<Rule> nodes(u.rules().begin(), u.rules().end());
        auto oracle = gen::brute_transitive_reduction(nodes, gen::brute_positional);
        std::set<std::pair<std::size_t, std::size_t>> got;
        for (const auto& e : u.edges()) got.emplace(e.parent, e.child);
        edges += got.size();
        bad += !is_proper(u, sa_subsumes) || got != oracle;
    }
    const double secs = since(t0);
    Outcome o;
    o.detail = fmt::format("1000 sets (largest {}), {} edges, {} improper, {:.1f} s", largest, edges, bad, secs);
    if (bad || secs >= 120.0) o.status = Status::Fail;
    return o;
}

Outcome monotonicity() {
    gen::Rng rng(4004);
    std::size_t edges = 0, violations = 0;
    for (int round = 0; round < 100; ++round) {
        auto store = small_kg(rng, 200, 24, 100);
        TargetContext ctx(store, 0);
        auto cfg = exact_config(round);
        cfg.relevance = {1, 0.0, 0.0};
        cfg.supp_h = 0;
        auto run = learn(store, 0, cfg, LearnOptions{true});
        const auto& h = *run.hierarchy;
        std::vector<std::size_t> supp(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) supp[i] = support(h.rule(i), ctx);
        for (const auto& e : h.edges()) {
            ++edges;
            violations += supp[e.child] > supp[e.parent];
        }
    }
    Outcome o;
    o.detail = fmt::format("100 graphs, {} edges, {} violations", edges, violations);
    if (violations || edges == 0) o.status = Status::Fail;
    return o;
}

Outcome prior_safety() {
    gen::Rng rng(4004);
    std::size_t runs = 0, mismatches = 0, low_cases = 0, unpruned_low = 0, informative_pruned = 0, pruned = 0;
    for (int round = 0; round < 100; ++round) {
        auto store = small_kg(rng, 200, 24, 100);
        TargetContext ctx(store, 0);
        auto base_cfg = exact_config(round);
        base_cfg.relevance.supp = 3;
        base_cfg.supp_h = 0;
        auto base = learn(store, 0, base_cfg);
        std::map<Rule, OarClass> base_class(base.oars.begin(), base.oars.end());
        for (std::size_t supp_h : {1, 2, 3}) {
            auto cfg = base_cfg;
            cfg.supp_h = supp_h;
            auto aug = learn(store, 0, cfg);
            ++runs;
            mismatches += aug.relevant_rules() != base.relevant_rules();
            bool any_low = false;
            std::size_t n_pruned = 0;
            for (const auto& [oar, cls] : aug.oars) {
                any_low = any_low || support(oar, ctx) < supp_h;
                if (cls != OarClass::Pruned) continue;
                ++n_pruned;
                auto it = base_class.find(oar);
                informative_pruned += it != base_class.end() && it->second == OarClass::Informative;
            }
            pruned += n_pruned;
            low_cases += any_low;
            unpruned_low += any_low && n_pruned == 0;
        }
    }
    Outcome o;
    o.detail = fmt::format(
        "{} runs, {} relevant-set mismatches, {} runs with low-support OARs, {} of them without pruning, "
        "{} OARs pruned ({} informative in the baseline)",
        runs, mismatches, low_cases, unpruned_low, pruned, informative_pruned);
    if (mismatches || unpruned_low || informative_pruned || low_cases == 0) o.status = Status::Fail;
    return o;
}

RuleBook book_of(const TargetRun& run) {
    RuleBook book;
    auto& list = book[run.target];
    for (const auto& m : run.rules) list.push_back({m.rule, m.measures.sc});
    return book;
}

Outcome post_invariance() {
    gen::Rng rng(6006);
    double worst = 0.0;
    std::size_t with_removal = 0, removed = 0;
    std::string per_run;
    const RelationId target = 0;
    for (int round = 0; round < 20; ++round) {
        auto store = small_kg(rng, 500, 40, 240);
        MinerConfig cfg;
        cfg.seed = round;
        cfg.max_length = 2;
        cfg.supp_h = 0;
        auto queries = test_queries(store, std::span<const RelationId>(&target, 1));
        cfg.post_prune = false;
        auto off = learn(store, target, cfg);
        cfg.post_prune = true;
        auto on = learn(store, target, cfg);
        const double m_off = evaluate_queries(store, book_of(off), queries).mrr;
        const double m_on = evaluate_queries(store, book_of(on), queries).mrr;
        worst = std::max(worst, std::abs(m_on - m_off));
        with_removal += !on.post_pruned.empty();
        removed += on.post_pruned.size();
    }
    Outcome o;
    o.detail = fmt::format("20 graphs, max |dMRR| = {:.6f}, BARs removed in {} runs ({} total)", worst,
                           with_removal, removed);
    if (worst > 0.005 || with_removal * 2 < 20) o.status = Status::Fail;
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

Outcome baseline_reduction() {
    const fs::path root = fs::temp_directory_path() / "rulehier_acceptance_ac7";
    fs::remove_all(root);
    gen::Rng rng(7007);
    std::size_t identical = 0, bytes = 0;
    std::string failure;
    const int datasets = 5;
    for (int round = 0; round < datasets && failure.empty(); ++round) {
        const fs::path data = root / ("data" + std::to_string(round));
        fs::create_directories(data);
        auto store = small_kg(rng, 400, 30, 200);
        store.write_split(data / "train.txt", Split::Train);
        store.write_split(data / "valid.txt", Split::Valid);
        store.write_split(data / "test.txt", Split::Test);
        const fs::path ini = root / "run.ini";
        {
            std::ofstream f(ini);
            f << "[run]\ndataset = " << data.string() << "\noutput = " << (root / "out").string()
              << "\n\n[miner]\nlen = 2\nwalks_per_instance = 6\nseed = " << round << "\n";
        }
        const std::string args = " learn --config " + ini.string() + " --supp-h 0 --post-prune off";
        if (run(std::string(RULEHIER_CLI) + args) != 0) {
            failure = "augmented learn failed";
            break;
        }
        const std::string augmented = slurp(root / "out" / "rules.txt");
        if (run(std::string(RULEHIER_CLI_BASELINE) + args) != 0) {
            failure = "baseline learn failed";
            break;
        }
        const std::string baseline = slurp(root / "out" / "rules.txt");
        identical += augmented == baseline && !augmented.empty();
        bytes += augmented.size();
    }
    fs::remove_all(root);
    Outcome o;
    if (!failure.empty()) {
        o.status = Status::Fail;
        o.detail = failure;
        return o;
    }
    o.detail = fmt::format("{} of {} datasets byte-identical ({} bytes of rules)", identical, datasets, bytes);
    if (identical != static_cast<std::size_t>(datasets)) o.status = Status::Fail;
    return o;
}

Outcome wn18rr() {
    Outcome o;
    const char* dir = std::getenv("RULEHIER_WN18RR");
    if (!dir || !*dir) {
        o.status = Status::Skip;
        o.detail = "set RULEHIER_WN18RR to a dataset directory to run (non-gating)";
        return o;
    }
    const fs::path root = fs::temp_directory_path() / "rulehier_acceptance_ac8";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path ini = root / "run.ini";
    {
        std::ofstream f(ini);
        f << "[run]\ndataset = " << (root / "data").string() << "\noutput = " << (root / "out").string()
          << "\nworkers = 8\n\n[evaluator]\nthreads = 8\n";
    }
    const auto t0 = Clock::now();
    if (run(std::string(RULEHIER_CLI) + " split --in " + dir + " --out " + (root / "data").string() +
            " --ratios 0.6,0.2,0.2 --seed 42") != 0 ||
        run(std::string(RULEHIER_CLI) + " bench --config " + ini.string() +
            " --thresholds 10 --post-prune-mode both") != 0) {
        o.status = Status::Fail;
        o.detail = "run failed";
        return o;
    }
    std::ifstream csv(root / "out" / "bench.csv");
    std::string line;
    std::getline(csv, line);
    std::map<std::string, std::pair<double, double>> by_pp;  // mrr, rat
    while (std::getline(csv, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
        if (f.size() == 12) by_pp[f[1]] = {std::stod(f[3]), std::stod(f[11])};
    }
    if (by_pp.size() != 2) {
        o.status = Status::Fail;
        o.detail = "bench output incomplete";
        return o;
    }
    const auto [mrr_off, rat_off] = by_pp["off"];
    const auto [mrr_on, rat_on] = by_pp["on"];
    o.detail = fmt::format("seed 42, MRR off {:.4f} on {:.4f}, RAT off {:.1f} s on {:.1f} s, {:.0f} s total", mrr_off,
                           mrr_on, rat_off, rat_on, since(t0));
    const bool ok = mrr_on >= 0.24 && mrr_on <= 0.34 && std::abs(mrr_on - mrr_off) <= 0.01 && rat_on < rat_off;
    if (!ok) o.status = Status::Fail;
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        bool gating;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "subsumption equivalence", true, equivalence},
        {2, "worked examples", true, worked_examples},
        {3, "hierarchy properness", true, properness},
        {4, "support monotonicity", true, monotonicity},
        {5, "prior-pruning safety", true, prior_safety},
        {6, "post-pruning MRR invariance", true, post_invariance},
        {7, "baseline reduction", true, baseline_reduction},
        {8, "WN18RR-LV run (stretch)", false, wn18rr},
    };
    bool failed = false;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.status = Status::Fail;
            o.detail = std::string("exception: ") + e.what();
        }
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
        fmt::print("AC{} {} {}: {}\n", c.id, tag, c.name, o.detail);
        std::fflush(stdout);
        failed = failed || (c.gating && o.status == Status::Fail);
    }
    return failed ? 1 : 0;
}
