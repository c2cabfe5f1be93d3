#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rulehier/evaluator.hpp"
#include "rulehier/miner.hpp"
#include "run_config.hpp"

namespace rulehier {

/// Entry point shared by the `rulehier` and `rulehier_baseline` binaries.
int run_cli(int argc, char** argv);

/// Mines each target on up to `workers` threads. Results follow `targets`.
/// Targets without train instances yield an empty run.
std::vector<TargetRun> mine_targets(const TripleStore& store, const std::vector<RelationId>& targets,
                                    const MinerConfig& cfg, unsigned workers, bool keep_hierarchy = false);

/// Rule file with the configuration echoed as '#' comments.
void write_rules(std::ostream& out, const std::vector<TargetRun>& runs, const Vocabulary& vocab,
                 const RunConfig& cfg);

/// `key = value` record of per-target counts.
void write_run_record(std::ostream& out, const std::vector<TargetRun>& runs, const Vocabulary& vocab,
                      const RunConfig& cfg);

struct RunRecordRow {
    std::string target;
    OarCounts oars;
    std::size_t rules = 0;
};

std::vector<RunRecordRow> read_run_record(std::istream& in);

/// Loads a rule file into per-target lists, interning names into `vocab`.
RuleBook read_rule_book(std::istream& in, Vocabulary& vocab);

}  // namespace rulehier
