#pragma once

// Run configuration: an INI file with [run], [miner] and [evaluator]
// sections, overridable key by key from the command line.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rulehier/evaluator.hpp"
#include "rulehier/miner.hpp"

namespace rulehier {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TargetMode : std::uint8_t { All, Random, List };

struct RunConfig {
    std::filesystem::path dataset;
    std::filesystem::path output = "out";
    TargetMode targets = TargetMode::All;
    std::size_t random_k = 20;
    std::vector<std::string> target_list;
    std::uint64_t target_seed = 42;
    unsigned workers = 1;
    std::filesystem::path emit_hierarchy;  // empty = none
    MinerConfig miner;
    EvaluationOptions eval;

    /// Defaults, then `path` (if not empty), then each `section.key=value`.
    static RunConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

    /// Sets one `section.key` from text. Throws ConfigError on an unknown key
    /// or a malformed value.
    void set(const std::string& key, const std::string& value);

    /// Effective configuration as INI text; loading it back gives an equal
    /// configuration.
    std::string to_ini() const;

    void validate() const;
};

/// Worker cap from RULEHIER_THREADS, or `requested` when unset.
unsigned effective_workers(unsigned requested);

/// Target predicates chosen by `cfg`, sorted by id. Throws ConfigError on an
/// unknown name or when random_k exceeds the number of relations.
std::vector<RelationId> select_targets(const TripleStore& store, const RunConfig& cfg);

}  // namespace rulehier
