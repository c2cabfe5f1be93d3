#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace rulehier {

namespace {

template <class T>
T parse_int(const std::string& key, const std::string& text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, text));
    return value;
}

double parse_double(const std::string& key, const std::string& text) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, text));
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (t == "true" || t == "on" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "off" || t == "no" || t == "0") return false;
    throw ConfigError(fmt::format("{}: expected true/false, got '{}'", key, text));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
    return out;
}

std::string_view mode_name(TargetMode m) {
    switch (m) {
        case TargetMode::All: return "all";
        case TargetMode::Random: return "random";
        case TargetMode::List: return "list";
    }
    return "all";
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"run.dataset", [](RunConfig& c, auto&, auto& v) { c.dataset = v; }},
        {"run.output", [](RunConfig& c, auto&, auto& v) { c.output = v; }},
        {"run.targets",
         [](RunConfig& c, auto& k, auto& v) {
             if (v == "all")
                 c.targets = TargetMode::All;
             else if (v == "random")
                 c.targets = TargetMode::Random;
             else if (v == "list")
                 c.targets = TargetMode::List;
             else
                 throw ConfigError(fmt::format("{}: expected all, random or list, got '{}'", k, v));
         }},
        {"run.random_k", [](RunConfig& c, auto& k, auto& v) { c.random_k = parse_int<std::size_t>(k, v); }},
        {"run.target_list", [](RunConfig& c, auto&, auto& v) { c.target_list = split_list(v); }},
        {"run.target_seed", [](RunConfig& c, auto& k, auto& v) { c.target_seed = parse_int<std::uint64_t>(k, v); }},
        {"run.workers", [](RunConfig& c, auto& k, auto& v) { c.workers = parse_int<unsigned>(k, v); }},
        {"run.emit_hierarchy", [](RunConfig& c, auto&, auto& v) { c.emit_hierarchy = v; }},
        {"miner.len", [](RunConfig& c, auto& k, auto& v) { c.miner.max_length = parse_int<std::size_t>(k, v); }},
        {"miner.supp_f", [](RunConfig& c, auto& k, auto& v) { c.miner.relevance.supp = parse_int<std::size_t>(k, v); }},
        {"miner.hc_f", [](RunConfig& c, auto& k, auto& v) { c.miner.relevance.hc = parse_double(k, v); }},
        {"miner.sc_f", [](RunConfig& c, auto& k, auto& v) { c.miner.relevance.sc = parse_double(k, v); }},
        {"miner.supp_h",
         [](RunConfig& c, auto& k, auto& v) {
             c.miner.supp_h = v == "inf" ? kPruneEverything : parse_int<std::size_t>(k, v);
         }},
        {"miner.post_prune", [](RunConfig& c, auto& k, auto& v) { c.miner.post_prune = parse_bool(k, v); }},
        {"miner.prior_prune_cars", [](RunConfig& c, auto& k, auto& v) { c.miner.prior_prune_cars = parse_bool(k, v); }},
        {"miner.eta", [](RunConfig& c, auto& k, auto& v) { c.miner.eta = parse_double(k, v); }},
        {"miner.overfit_threshold", [](RunConfig& c, auto& k, auto& v) { c.miner.overfit_threshold = parse_double(k, v); }},
        {"miner.overfit_cars", [](RunConfig& c, auto& k, auto& v) { c.miner.overfit_cars = parse_bool(k, v); }},
        {"miner.walks_per_instance",
         [](RunConfig& c, auto& k, auto& v) { c.miner.walks_per_instance = parse_int<std::size_t>(k, v); }},
        {"miner.gen_budget", [](RunConfig& c, auto& k, auto& v) { c.miner.gen_budget_seconds = parse_double(k, v); }},
        {"miner.spec_budget", [](RunConfig& c, auto& k, auto& v) { c.miner.spec_budget_seconds = parse_double(k, v); }},
        {"miner.max_groundings",
         [](RunConfig& c, auto& k, auto& v) { c.miner.max_groundings = parse_int<std::size_t>(k, v); }},
        {"miner.max_specializations",
         [](RunConfig& c, auto& k, auto& v) { c.miner.max_specializations = parse_int<std::size_t>(k, v); }},
        {"miner.seed", [](RunConfig& c, auto& k, auto& v) { c.miner.seed = parse_int<std::uint64_t>(k, v); }},
        {"evaluator.max_groundings",
         [](RunConfig& c, auto& k, auto& v) { c.eval.max_groundings = parse_int<std::size_t>(k, v); }},
        {"evaluator.threads", [](RunConfig& c, auto& k, auto& v) { c.eval.threads = parse_int<unsigned>(k, v); }},
    };
    return table;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(fmt::format("unknown configuration key '{}'", key));
    it->second(*this, key, value);
}

RunConfig RunConfig::load(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::read_ini(path.string(), tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(e.what());
        }
        for (const auto& [section, body] : tree) {
            if (body.empty() && !body.data().empty())
                throw ConfigError(fmt::format("{}: key '{}' outside a section", path.string(), section));
            for (const auto& [key, value] : body) cfg.set(section + "." + key, value.data());
        }
    }
    for (const auto& o : overrides) {
        auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' is not key=value", o));
        cfg.set(o.substr(0, eq), o.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    try {
        miner.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (targets == TargetMode::List && target_list.empty())
        throw ConfigError("run.targets = list needs run.target_list");
}

std::string RunConfig::to_ini() const {
    const auto& m = miner;
    std::string out;
    out += "[run]\n";
    out += fmt::format("dataset = {}\n", dataset.string());
    out += fmt::format("output = {}\n", output.string());
    out += fmt::format("targets = {}\n", mode_name(targets));
    out += fmt::format("random_k = {}\n", random_k);
    out += fmt::format("target_list = {}\n", join(target_list));
    out += fmt::format("target_seed = {}\n", target_seed);
    out += fmt::format("workers = {}\n", workers);
    out += fmt::format("emit_hierarchy = {}\n", emit_hierarchy.string());
    out += "\n[miner]\n";
    out += fmt::format("len = {}\n", m.max_length);
    out += fmt::format("supp_f = {}\n", m.relevance.supp);
    out += fmt::format("hc_f = {}\n", m.relevance.hc);
    out += fmt::format("sc_f = {}\n", m.relevance.sc);
    out += fmt::format("supp_h = {}\n", m.supp_h == kPruneEverything ? std::string("inf") : std::to_string(m.supp_h));
    out += fmt::format("post_prune = {}\n", m.post_prune);
    out += fmt::format("prior_prune_cars = {}\n", m.prior_prune_cars);
    out += fmt::format("eta = {}\n", m.eta);
    out += fmt::format("overfit_threshold = {}\n", m.overfit_threshold);
    out += fmt::format("overfit_cars = {}\n", m.overfit_cars);
    out += fmt::format("walks_per_instance = {}\n", m.walks_per_instance);
    out += fmt::format("gen_budget = {}\n", m.gen_budget_seconds);
    out += fmt::format("spec_budget = {}\n", m.spec_budget_seconds);
    out += fmt::format("max_groundings = {}\n", m.max_groundings);
    out += fmt::format("max_specializations = {}\n", m.max_specializations);
    out += fmt::format("seed = {}\n", m.seed);
    out += "\n[evaluator]\n";
    out += fmt::format("max_groundings = {}\n", eval.max_groundings);
    out += fmt::format("threads = {}\n", eval.threads);
    return out;
}

unsigned effective_workers(unsigned requested) {
    unsigned n = std::max(1u, requested);
    if (const char* env = std::getenv("RULEHIER_THREADS")) {
        unsigned cap = 0;
        std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
        if (ec == std::errc() && ptr == s.data() + s.size() && cap > 0) n = std::min(n, cap);
    }
    return n;
}

std::vector<RelationId> select_targets(const TripleStore& store, const RunConfig& cfg) {
    std::vector<RelationId> out;
    const auto& rels = store.vocabulary().relations;
    switch (cfg.targets) {
        case TargetMode::All:
            for (RelationId r = 0; r < rels.size(); ++r)
                if (!store.train_by_relation(r).empty()) out.push_back(r);
            break;
        case TargetMode::Random: {
            if (cfg.random_k > rels.size())
                throw ConfigError(fmt::format("run.random_k = {} exceeds the {} relations of the dataset",
                                              cfg.random_k, rels.size()));
            std::vector<RelationId> eligible;
            for (RelationId r = 0; r < rels.size(); ++r)
                if (store.train_by_relation(r).size() >= cfg.miner.relevance.supp + 1) eligible.push_back(r);
            std::mt19937_64 rng(cfg.target_seed);
            std::shuffle(eligible.begin(), eligible.end(), rng);
            eligible.resize(std::min(eligible.size(), cfg.random_k));
            out = std::move(eligible);
            break;
        }
        case TargetMode::List:
            for (const auto& name : cfg.target_list) {
                auto id = rels.find(name);
                if (!id) throw ConfigError(fmt::format("unknown target predicate '{}'", name));
                out.push_back(*id);
            }
            break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace rulehier
