#pragma once

// In-memory knowledge graph with interned ids and train-only adjacency
// indices. Valid and test triples are kept for membership queries only.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace rulehier {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

// Ids at or above this value never name a real entity; the rule model
// uses the range for skolem constants.
inline constexpr EntityId kSkolemBase = 0x80000000u;

enum class Split : std::uint8_t { Train = 0, Valid = 1, Test = 2 };

std::string_view split_name(Split s);
Split parse_split(std::string_view name);

struct Triple {
    RelationId rel = 0;
    EntityId head = 0;
    EntityId tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t h = (static_cast<std::uint64_t>(t.head) << 32) ^ t.tail;
        h ^= static_cast<std::uint64_t>(t.rel) * 0x9E3779B97F4A7C15ull;
        h ^= h >> 29;
        return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ull);
    }
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bidirectional string <-> dense id table. Ids are assigned in first-seen
/// order.
class Dictionary {
public:
    std::uint32_t intern(std::string_view name);
    std::optional<std::uint32_t> find(std::string_view name) const;
    const std::string& name(std::uint32_t id) const { return names_.at(id); }
    std::size_t size() const noexcept { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Vocabulary {
    Dictionary entities;
    Dictionary relations;
};

enum class Direction : std::uint8_t { Out, In, Both };

/// One incident edge of an entity. `outgoing` is true when the entity is the
/// head of the underlying triple.
struct Neighbor {
    RelationId rel;
    EntityId other;
    bool outgoing;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct SplitConfig {
    double train = 0.6;
    double valid = 0.2;
    double test = 0.2;
    std::uint64_t seed = 42;

    void validate() const;
};

class TripleStore {
public:
    TripleStore() = default;
    explicit TripleStore(Vocabulary vocab) : vocab_(std::move(vocab)) {}

    /// Reads tab-separated `head TAB relation TAB tail` lines into `split`.
    /// Returns the number of triples added by this call.
    std::size_t load_triples(const std::filesystem::path& path, Split split);
    std::size_t load_triples_from(std::istream& in, Split split);

    /// Loads train/valid/test.txt from a dataset directory; missing valid or
    /// test files are treated as empty.
    static TripleStore load_dataset(const std::filesystem::path& dir);

    /// Returns false (and bumps the duplicate counter) if the triple already
    /// exists in any split.
    bool add(std::string_view head, std::string_view rel, std::string_view tail, Split split);
    bool add(const Triple& t, Split split);

    const Vocabulary& vocabulary() const noexcept { return vocab_; }
    Vocabulary& vocabulary() noexcept { return vocab_; }
    std::size_t num_entities() const noexcept { return vocab_.entities.size(); }
    std::size_t num_relations() const noexcept { return vocab_.relations.size(); }
    std::size_t duplicate_count() const noexcept { return duplicates_; }

    std::span<const Triple> triples(Split split) const {
        return splits_[static_cast<std::size_t>(split)];
    }
    std::size_t size() const noexcept;

    std::optional<Split> split_of(const Triple& t) const;
    bool contains(const Triple& t, Split split) const;
    bool contains_any(const Triple& t) const { return membership_.contains(t); }

    // Train-split indices.
    std::span<const EntityId> objects(RelationId rel, EntityId subject) const;
    std::span<const EntityId> subjects(RelationId rel, EntityId object) const;
    std::span<const Triple> train_by_relation(RelationId rel) const;
    bool has_train(RelationId rel, EntityId head, EntityId tail) const {
        return contains(Triple{rel, head, tail}, Split::Train);
    }

    std::vector<std::pair<EntityId, EntityId>> instances_of(RelationId rel, Split split) const;
    std::vector<Neighbor> neighbors(EntityId e, Direction dir) const;
    std::span<const Neighbor> incident(EntityId e) const;

    /// Fraction of valid+test triples (r, x, y) whose reverse pair (y, x)
    /// is connected in train by some relation (or by r itself when
    /// `same_relation_only`).
    double reverse_triple_fraction(bool same_relation_only = false) const;

    /// Writes one split in the triple grammar, in stored order.
    void write_split(const std::filesystem::path& path, Split split) const;

private:
    static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }
    void index_train(const Triple& t);

    Vocabulary vocab_;
    std::vector<Triple> splits_[3];
    std::unordered_map<Triple, Split, TripleHash> membership_;
    std::unordered_map<std::uint64_t, std::vector<EntityId>> fwd_;
    std::unordered_map<std::uint64_t, std::vector<EntityId>> bwd_;
    std::unordered_map<RelationId, std::vector<Triple>> by_relation_;
    std::vector<std::vector<Neighbor>> by_entity_;
    std::size_t duplicates_ = 0;
};

/// Shuffles the union of all splits with `cfg.seed` and repartitions it.
/// Valid and test sizes are floored; train receives the remainder.
TripleStore resplit(const TripleStore& store, const SplitConfig& cfg);

}  // namespace rulehier
