#include "app.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rulehier/hierarchy.hpp"
#include "rulehier/rule_file.hpp"
#include "rulehier/rule_io.hpp"
#include "rulehier/subsumption.hpp"

namespace rulehier {

namespace fs = std::filesystem;

namespace {

void echo_config(std::ostream& out, const RunConfig& cfg) {
    std::istringstream in(cfg.to_ini());
    std::string line;
    while (std::getline(in, line)) out << (line.empty() ? "#" : "# " + line) << '\n';
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write {}", p.string()));
    return out;
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot read {}", p.string()));
    return in;
}

// Options shared by the config-driven commands. Shorthand flags become
// overrides applied before any --set.
struct ConfigArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string dataset;
    std::string output;
    std::string supp_h;
    std::string post_prune;
    std::string prior_prune_cars;
    std::string workers;
    std::string emit_hierarchy;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "INI configuration file");
        cmd->add_option("--set", sets, "Override one key, e.g. miner.supp_h=10")->take_all();
        cmd->add_option("--dataset", dataset, "Dataset directory with train/valid/test.txt");
        cmd->add_option("--out", output, "Output directory");
        cmd->add_option("--supp-h", supp_h, "Prior pruning threshold (0 disables)");
        cmd->add_option("--post-prune", post_prune, "Post pruning on/off");
        cmd->add_option("--prior-prune-cars", prior_prune_cars, "Let prior pruning remove CARs (true/false)");
        cmd->add_option("--workers", workers, "Parallel mining workers");
        cmd->add_option("--emit-hierarchy", emit_hierarchy, "Write the rule hierarchy as a DOT digraph");
    }

    RunConfig load() const {
        std::vector<std::string> o;
        auto add = [&](const char* key, const std::string& v) {
            if (!v.empty()) o.push_back(std::string(key) + "=" + v);
        };
        add("run.dataset", dataset);
        add("run.output", output);
        add("miner.supp_h", supp_h);
        add("miner.post_prune", post_prune);
        add("miner.prior_prune_cars", prior_prune_cars);
        add("run.workers", workers);
        add("run.emit_hierarchy", emit_hierarchy);
        o.insert(o.end(), sets.begin(), sets.end());
        RunConfig cfg = RunConfig::load(config, o);
        if (cfg.dataset.empty()) throw ConfigError("run.dataset is not set");
        cfg.dataset = fs::weakly_canonical(cfg.dataset);
        return cfg;
    }
};

OarCounts total_counts(const std::vector<TargetRun>& runs) {
    OarCounts c;
    for (const auto& r : runs) c += classify_oars(r);
    return c;
}

std::size_t total_rules(const std::vector<TargetRun>& runs) {
    std::size_t n = 0;
    for (const auto& r : runs) n += r.rules.size();
    return n;
}

RuleBook book_from_runs(const std::vector<TargetRun>& runs) {
    RuleBook book;
    for (const auto& run : runs) {
        auto& list = book[run.target];
        for (const auto& m : run.rules) list.push_back({m.rule, m.measures.sc});
    }
    return book;
}

int cmd_split(const std::string& in_dir, const std::string& out_dir, const std::string& ratios,
              std::uint64_t seed, bool same_relation_only) {
    SplitConfig sc;
    sc.seed = seed;
    std::vector<double> r;
    std::stringstream ss(ratios);
    std::string item;
    while (std::getline(ss, item, ',')) r.push_back(std::stod(item));
    if (r.size() != 3) throw ConfigError("--ratios needs three comma-separated values");
    sc.train = r[0];
    sc.valid = r[1];
    sc.test = r[2];
    sc.validate();

    TripleStore store = TripleStore::load_dataset(in_dir);
    TripleStore out = resplit(store, sc);
    fs::create_directories(out_dir);
    out.write_split(fs::path(out_dir) / "train.txt", Split::Train);
    out.write_split(fs::path(out_dir) / "valid.txt", Split::Valid);
    out.write_split(fs::path(out_dir) / "test.txt", Split::Test);
    fmt::print("train = {}\nvalid = {}\ntest = {}\nseed = {}\n", out.triples(Split::Train).size(),
               out.triples(Split::Valid).size(), out.triples(Split::Test).size(), seed);
    if (!out.triples(Split::Valid).empty() || !out.triples(Split::Test).empty())
        fmt::print("reverse_fraction = {:.4f}\n", out.reverse_triple_fraction(same_relation_only));
    return 0;
}

int cmd_learn(const ConfigArgs& args) {
    RunConfig cfg = args.load();
    TripleStore store = TripleStore::load_dataset(cfg.dataset);
    auto targets = select_targets(store, cfg);
    const bool emit = !cfg.emit_hierarchy.empty();
    auto t0 = std::chrono::steady_clock::now();
    auto runs = mine_targets(store, targets, cfg.miner, effective_workers(cfg.workers), emit);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(cfg.output);
    {
        auto out = open_out(cfg.output / "rules.txt");
        write_rules(out, runs, store.vocabulary(), cfg);
    }
    {
        auto out = open_out(cfg.output / "run.txt");
        write_run_record(out, runs, store.vocabulary(), cfg);
    }
    {
        auto out = open_out(cfg.output / "config.ini");
        out << cfg.to_ini();
    }
    if (emit) {
        Hierarchy all;
        for (const auto& r : runs)
            if (r.hierarchy) all = unite(all, *r.hierarchy);
        auto out = open_out(cfg.emit_hierarchy);
        write_dot(out, all, store.vocabulary());
    }
    auto c = total_counts(runs);
    fmt::print("targets = {}\nrules = {}\np_oar = {}\ni_oar = {}\nu_oar = {}\nskipped = {}\nseconds = {:.3f}\n",
               targets.size(), total_rules(runs), c.pruned, c.informative, c.uninformative, c.skipped, secs);
    return 0;
}

int cmd_eval(const ConfigArgs& args, const std::string& rules_path) {
    RunConfig cfg = args.load();
    TripleStore store = TripleStore::load_dataset(cfg.dataset);
    const fs::path path = rules_path.empty() ? cfg.output / "rules.txt" : fs::path(rules_path);
    auto in = open_in(path);
    // Names interned while reading rules must not shift entity counts used
    // elsewhere, so targets are selected first.
    auto targets = select_targets(store, cfg);
    RuleBook book = read_rule_book(in, store.vocabulary());
    std::size_t n_rules = 0;
    for (const auto& [t, list] : book) n_rules += list.size();
    if (n_rules == 0) fmt::print(std::cerr, "rulehier: warning: rule file {} is empty\n", path.string());

    auto queries = test_queries(store, targets);
    EvaluationOptions opts = cfg.eval;
    opts.threads = effective_workers(opts.threads);
    auto res = evaluate_queries(store, book, queries, opts);

    fs::create_directories(cfg.output);
    {
        auto out = open_out(cfg.output / "predictions.tsv");
        write_predictions(out, res, store.vocabulary());
    }
    {
        auto out = open_out(cfg.output / "metrics.txt");
        echo_config(out, cfg);
        out << "rules = " << n_rules << '\n';
        write_metrics(out, res);
    }
    fmt::print("rules = {}\n", n_rules);
    write_metrics(std::cout, res);
    return 0;
}

int cmd_stats(const std::string& run_path) {
    auto in = open_in(run_path);
    auto rows = read_run_record(in);
    std::size_t width = 6;
    for (const auto& r : rows) width = std::max(width, r.target.size());
    fmt::print("{:<{}}  {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}\n", "target", width, "P-OAR", "I-OAR", "U-OAR", "skipped",
               "total", "rules");
    OarCounts sum;
    std::size_t rules = 0;
    for (const auto& r : rows) {
        fmt::print("{:<{}}  {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}\n", r.target, width, r.oars.pruned, r.oars.informative,
                   r.oars.uninformative, r.oars.skipped, r.oars.total(), r.rules);
        sum += r.oars;
        rules += r.rules;
    }
    fmt::print("{:<{}}  {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}\n", "total", width, sum.pruned, sum.informative,
               sum.uninformative, sum.skipped, sum.total(), rules);
    return 0;
}

int cmd_bench(const ConfigArgs& args, const std::string& thresholds, const std::string& mode) {
    RunConfig cfg = args.load();
    TripleStore store = TripleStore::load_dataset(cfg.dataset);
    auto targets = select_targets(store, cfg);
    auto queries = test_queries(store, targets);
    const unsigned workers = effective_workers(cfg.workers);

    std::vector<std::size_t> hs;
    {
        std::stringstream ss(thresholds);
        std::string item;
        while (std::getline(ss, item, ',')) {
            RunConfig probe;
            probe.set("miner.supp_h", item);
            hs.push_back(probe.miner.supp_h);
        }
    }
    if (hs.empty()) throw ConfigError("--thresholds is empty");
    if (mode != "auto" && mode != "on" && mode != "off" && mode != "both")
        throw ConfigError("--post-prune-mode must be auto, on, off or both");

    fs::create_directories(cfg.output / "bench");
    auto csv = open_out(cfg.output / "bench.csv");
    csv << "threshold,post_prune,runtime_s,mrr,hits1,hits10,rules,p_oar,i_oar,u_oar,skipped,rat_s\n";
    fmt::print("threshold post_prune runtime_s mrr rules P I U RAT\n");
    for (std::size_t h : hs) {
        std::vector<bool> pps;
        if (mode == "auto")
            pps = {h != 0};
        else if (mode == "both")
            pps = {false, true};
        else
            pps = {mode == "on"};
        for (bool pp : pps) {
            RunConfig row = cfg;
            row.miner.supp_h = h;
            row.miner.post_prune = pp;
            auto t0 = std::chrono::steady_clock::now();
            auto runs = mine_targets(store, targets, row.miner, workers);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const std::string h_text = h == kPruneEverything ? "inf" : std::to_string(h);
            {
                auto out = open_out(cfg.output / "bench" / fmt::format("rules_h{}_pp{}.txt", h_text, pp ? "on" : "off"));
                write_rules(out, runs, store.vocabulary(), row);
            }
            EvaluationOptions opts = cfg.eval;
            opts.threads = effective_workers(opts.threads);
            auto res = evaluate_queries(store, book_from_runs(runs), queries, opts);
            auto c = total_counts(runs);
            fmt::print(csv, "{},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{},{},{},{:.6f}\n", h_text, pp ? "on" : "off", secs,
                       res.mrr, res.hits1, res.hits10, total_rules(runs), c.pruned, c.informative, c.uninformative,
                       c.skipped, res.rat_seconds);
            fmt::print("{} {} {:.3f} {:.4f} {} {} {} {} {:.3f}\n", h_text, pp ? "on" : "off", secs, res.mrr,
                       total_rules(runs), c.pruned, c.informative, c.uninformative, res.rat_seconds);
        }
    }
    return 0;
}

int cmd_subsume(const std::string& a, const std::string& b) {
    Vocabulary vocab;
    Rule p = parse_rule(a, vocab);
    Rule q = parse_rule(b, vocab);
    std::vector<EliminationStep> trace;
    const bool oi = oi_subsumes(p, q, &trace);
    fmt::print("p = {}  [{}, d={}]\n", format_rule(p, vocab), kind_name(p.kind()), p.deduction_level());
    fmt::print("q = {}  [{}, d={}]\n", format_rule(q, vocab), kind_name(q.kind()), q.deduction_level());
    fmt::print("theta = {}\n", theta_subsumes(p, q));
    fmt::print("oi = {}\n", oi);
    fmt::print("sa = {}\n", sa_subsumes(p, q));
    fmt::print("sa_complete = {}\n", sa_subsumes_complete(p, q));
    fmt::print("a = {}\n", a_subsumes(p, q));
    fmt::print("i = {}\n", i_subsumes(p, q));
    fmt::print("connected_straight = {}\n",
               is_connected(p) && is_straight(p) && is_connected(q) && is_straight(q));
    fmt::print("oi_trace =");
    for (const auto& s : trace) fmt::print(" ({},{},{})", s.p_index, s.q_index, s.eliminated ? "ok" : "fail");
    fmt::print("\n");
    return 0;
}

}  // namespace

std::vector<TargetRun> mine_targets(const TripleStore& store, const std::vector<RelationId>& targets,
                                    const MinerConfig& cfg, unsigned workers, bool keep_hierarchy) {
    std::vector<TargetRun> runs(targets.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < targets.size(); i = next++) {
            try {
                runs[i] = learn(store, targets[i], cfg, {keep_hierarchy});
            } catch (const EmptyTargetError&) {
                runs[i].target = targets[i];
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, unsigned(targets.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return runs;
}

void write_rules(std::ostream& out, const std::vector<TargetRun>& runs, const Vocabulary& vocab,
                 const RunConfig& cfg) {
    echo_config(out, cfg);
    for (const auto& run : runs)
        for (const auto& m : run.rules) out << format_rule_line(m.rule, m.measures, vocab) << '\n';
}

void write_run_record(std::ostream& out, const std::vector<TargetRun>& runs, const Vocabulary& vocab,
                      const RunConfig& cfg) {
    echo_config(out, cfg);
    fmt::print(out, "targets = {}\n", runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        const auto c = classify_oars(r);
        auto kv = [&](std::string_view key, auto value) { fmt::print(out, "target.{}.{} = {}\n", i, key, value); };
        kv("name", vocab.relations.name(r.target));
        kv("rules", r.rules.size());
        kv("abstract_rules", r.abstract_rules);
        kv("survivors", r.survivors);
        kv("p_oar", c.pruned);
        kv("i_oar", c.informative);
        kv("u_oar", c.uninformative);
        kv("skipped", c.skipped);
        kv("post_pruned", r.post_pruned.size());
        kv("orphans", r.orphans);
        kv("truncated_oars", r.truncated_oars);
        kv("gen_seconds", fmt::format("{:.6f}", r.gen_seconds));
        kv("spec_seconds", fmt::format("{:.6f}", r.spec_seconds));
        kv("gen_budget_hit", r.gen_budget_hit);
        kv("spec_budget_hit", r.spec_budget_hit);
    }
    const auto c = total_counts(runs);
    fmt::print(out, "total.rules = {}\ntotal.p_oar = {}\ntotal.i_oar = {}\ntotal.u_oar = {}\ntotal.skipped = {}\n",
               total_rules(runs), c.pruned, c.informative, c.uninformative, c.skipped);
}

std::vector<RunRecordRow> read_run_record(std::istream& in) {
    std::vector<RunRecordRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("target.", 0) != 0) continue;
        auto eq = line.find(" = ");
        auto dot = line.find('.', 7);
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw ParseError(fmt::format("run record line {} is malformed", line_no), line_no);
        const std::size_t idx = std::stoul(line.substr(7, dot - 7));
        const std::string key = line.substr(dot + 1, eq - dot - 1);
        const std::string value = line.substr(eq + 3);
        if (idx >= rows.size()) rows.resize(idx + 1);
        auto& row = rows[idx];
        auto num = [&] { return static_cast<std::size_t>(std::stoull(value)); };
        if (key == "name")
            row.target = value;
        else if (key == "rules")
            row.rules = num();
        else if (key == "p_oar")
            row.oars.pruned = num();
        else if (key == "i_oar")
            row.oars.informative = num();
        else if (key == "u_oar")
            row.oars.uninformative = num();
        else if (key == "skipped")
            row.oars.skipped = num();
    }
    return rows;
}

RuleBook read_rule_book(std::istream& in, Vocabulary& vocab) {
    RuleBook book;
    for (auto& line : read_rule_file(in, vocab)) book[line.rule.target()].push_back({line.rule, line.sc});
    return book;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Rule mining over knowledge graphs with subsumption hierarchies", "rulehier"};
    app.require_subcommand(1);

    auto* split = app.add_subcommand("split", "Re-split a dataset into train/valid/test");
    std::string in_dir, out_dir, ratios = "0.6,0.2,0.2";
    std::uint64_t seed = 42;
    bool same_rel = false;
    split->add_option("--in", in_dir, "Dataset directory")->required();
    split->add_option("--out", out_dir, "Output directory")->required();
    split->add_option("--ratios", ratios, "train,valid,test ratios")->capture_default_str();
    split->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
    split->add_flag("--same-relation-only", same_rel, "Count reverse triples of the same relation only");

    auto* learn_cmd = app.add_subcommand("learn", "Mine rules for the configured targets");
    ConfigArgs learn_args;
    learn_args.attach(learn_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "Answer test queries with a rule file");
    ConfigArgs eval_args;
    std::string rules_path;
    eval_args.attach(eval_cmd);
    eval_cmd->add_option("--rules", rules_path, "Rule file (default <out>/rules.txt)");

    auto* stats_cmd = app.add_subcommand("stats", "OAR classification table of a run record");
    std::string run_path = "out/run.txt";
    stats_cmd->add_option("--run", run_path, "Run record")->capture_default_str();

    auto* bench_cmd = app.add_subcommand("bench", "Sweep prior thresholds and write a CSV");
    ConfigArgs bench_args;
    std::string thresholds = "0,10", pp_mode = "auto";
    bench_args.attach(bench_cmd);
    bench_cmd->add_option("--thresholds", thresholds, "Comma-separated prior thresholds")->capture_default_str();
    bench_cmd->add_option("--post-prune-mode", pp_mode, "auto (off at 0, on otherwise), on, off or both")
        ->capture_default_str();

    auto* subsume_cmd = app.add_subcommand("subsume", "Run every subsumption decider on two rules");
    std::string rule_a, rule_b;
    subsume_cmd->add_option("p", rule_a, "Candidate general rule")->required();
    subsume_cmd->add_option("q", rule_b, "Candidate specific rule")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*split) return cmd_split(in_dir, out_dir, ratios, seed, same_rel);
        if (*learn_cmd) return cmd_learn(learn_args);
        if (*eval_cmd) return cmd_eval(eval_args, rules_path);
        if (*stats_cmd) return cmd_stats(run_path);
        if (*bench_cmd) return cmd_bench(bench_args, thresholds, pp_mode);
        if (*subsume_cmd) return cmd_subsume(rule_a, rule_b);
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "rulehier: error: {}\n", e.what());
        return 1;
    }
    return 1;
}

}  // namespace rulehier
