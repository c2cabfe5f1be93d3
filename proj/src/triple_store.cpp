#include "rulehier/triple_store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

namespace rulehier {

namespace {

const std::vector<EntityId> kNoEntities;
const std::vector<Triple> kNoTriples;
const std::vector<Neighbor> kNoNeighbors;

}  // namespace

std::string_view split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "?";
}

Split parse_split(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "valid") return Split::Valid;
    if (name == "test") return Split::Test;
    throw std::invalid_argument("unknown split tag: " + std::string(name));
}

std::uint32_t Dictionary::intern(std::string_view name) {
    auto it = ids_.find(std::string(name));
    if (it != ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names_.size());
    if (id >= kSkolemBase) throw std::length_error("dictionary overflow");
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
}

std::optional<std::uint32_t> Dictionary::find(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

void SplitConfig::validate() const {
    if (train < 0 || valid < 0 || test < 0)
        throw std::invalid_argument("split ratios must be non-negative");
    if (std::abs(train + valid + test - 1.0) > 1e-9)
        throw std::invalid_argument("split ratios must sum to 1");
}

std::size_t TripleStore::load_triples(const std::filesystem::path& path, Split split) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return load_triples_from(in, split);
}

std::size_t TripleStore::load_triples_from(std::istream& in, Split split) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t added = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 3 tab-separated fields",
                             line_no);
        std::string_view sv(line);
        auto head = sv.substr(0, t1);
        auto rel = sv.substr(t1 + 1, t2 - t1 - 1);
        auto tail = sv.substr(t2 + 1);
        if (head.empty() || rel.empty() || tail.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty field", line_no);
        if (add(head, rel, tail, split)) ++added;
    }
    if (in.bad()) throw IoError("read failure");
    return added;
}

TripleStore TripleStore::load_dataset(const std::filesystem::path& dir) {
    TripleStore store;
    store.load_triples(dir / "train.txt", Split::Train);
    for (auto [file, split] : {std::pair{"valid.txt", Split::Valid}, std::pair{"test.txt", Split::Test}}) {
        if (std::filesystem::exists(dir / file)) store.load_triples(dir / file, split);
    }
    return store;
}

bool TripleStore::add(std::string_view head, std::string_view rel, std::string_view tail, Split split) {
    Triple t{vocab_.relations.intern(rel), vocab_.entities.intern(head), vocab_.entities.intern(tail)};
    return add(t, split);
}

bool TripleStore::add(const Triple& t, Split split) {
    if (t.head >= vocab_.entities.size() || t.tail >= vocab_.entities.size() ||
        t.rel >= vocab_.relations.size())
        throw std::out_of_range("triple references an unknown id");
    if (!membership_.emplace(t, split).second) {
        ++duplicates_;
        return false;
    }
    splits_[static_cast<std::size_t>(split)].push_back(t);
    if (split == Split::Train) index_train(t);
    return true;
}

void TripleStore::index_train(const Triple& t) {
    fwd_[key(t.rel, t.head)].push_back(t.tail);
    bwd_[key(t.rel, t.tail)].push_back(t.head);
    by_relation_[t.rel].push_back(t);
    auto need = std::max(t.head, t.tail) + 1;
    if (by_entity_.size() < need) by_entity_.resize(need);
    by_entity_[t.head].push_back({t.rel, t.tail, true});
    by_entity_[t.tail].push_back({t.rel, t.head, false});
}

std::size_t TripleStore::size() const noexcept {
    return splits_[0].size() + splits_[1].size() + splits_[2].size();
}

std::optional<Split> TripleStore::split_of(const Triple& t) const {
    auto it = membership_.find(t);
    if (it == membership_.end()) return std::nullopt;
    return it->second;
}

bool TripleStore::contains(const Triple& t, Split split) const {
    auto it = membership_.find(t);
    return it != membership_.end() && it->second == split;
}

std::span<const EntityId> TripleStore::objects(RelationId rel, EntityId subject) const {
    auto it = fwd_.find(key(rel, subject));
    return it == fwd_.end() ? std::span<const EntityId>(kNoEntities) : std::span(it->second);
}

std::span<const EntityId> TripleStore::subjects(RelationId rel, EntityId object) const {
    auto it = bwd_.find(key(rel, object));
    return it == bwd_.end() ? std::span<const EntityId>(kNoEntities) : std::span(it->second);
}

std::span<const Triple> TripleStore::train_by_relation(RelationId rel) const {
    auto it = by_relation_.find(rel);
    return it == by_relation_.end() ? std::span<const Triple>(kNoTriples) : std::span(it->second);
}

std::vector<std::pair<EntityId, EntityId>> TripleStore::instances_of(RelationId rel, Split split) const {
    std::vector<std::pair<EntityId, EntityId>> out;
    if (split == Split::Train) {
        for (const auto& t : train_by_relation(rel)) out.emplace_back(t.head, t.tail);
        return out;
    }
    for (const auto& t : triples(split))
        if (t.rel == rel) out.emplace_back(t.head, t.tail);
    return out;
}

std::span<const Neighbor> TripleStore::incident(EntityId e) const {
    if (e >= by_entity_.size()) return kNoNeighbors;
    return by_entity_[e];
}

std::vector<Neighbor> TripleStore::neighbors(EntityId e, Direction dir) const {
    std::vector<Neighbor> out;
    for (const auto& n : incident(e)) {
        if (dir == Direction::Both || (dir == Direction::Out) == n.outgoing) out.push_back(n);
    }
    return out;
}

double TripleStore::reverse_triple_fraction(bool same_relation_only) const {
    std::size_t total = 0;
    std::size_t reversed = 0;
    for (Split s : {Split::Valid, Split::Test}) {
        for (const auto& t : triples(s)) {
            ++total;
            bool hit = false;
            if (same_relation_only) {
                hit = has_train(t.rel, t.tail, t.head);
            } else {
                for (const auto& n : incident(t.tail)) {
                    if (n.outgoing && n.other == t.head) {
                        hit = true;
                        break;
                    }
                }
            }
            if (hit) ++reversed;
        }
    }
    if (total == 0) throw std::domain_error("reverse-triple fraction undefined: no valid/test triples");
    return static_cast<double>(reversed) / static_cast<double>(total);
}

void TripleStore::write_split(const std::filesystem::path& path, Split split) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& t : triples(split)) {
        out << vocab_.entities.name(t.head) << '\t' << vocab_.relations.name(t.rel) << '\t'
            << vocab_.entities.name(t.tail) << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

TripleStore resplit(const TripleStore& store, const SplitConfig& cfg) {
    cfg.validate();
    if (store.size() == 0) throw std::invalid_argument("resplit of an empty store");

    std::vector<Triple> all;
    all.reserve(store.size());
    for (Split s : {Split::Train, Split::Valid, Split::Test}) {
        auto part = store.triples(s);
        all.insert(all.end(), part.begin(), part.end());
    }
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(all.begin(), all.end(), rng);

    const auto n = static_cast<double>(all.size());
    const auto n_valid = static_cast<std::size_t>(std::floor(n * cfg.valid + 1e-9));
    const auto n_test = static_cast<std::size_t>(std::floor(n * cfg.test + 1e-9));

    TripleStore out(store.vocabulary());
    for (std::size_t i = 0; i < all.size(); ++i) {
        Split s = i < n_valid ? Split::Valid : (i < n_valid + n_test ? Split::Test : Split::Train);
        out.add(all[i], s);
    }
    return out;
}

}  // namespace rulehier
