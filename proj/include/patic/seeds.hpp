#pragma once

// Minimal statement subsets that keep the model's prediction: the
// monotonicity-pruned search and the exhaustive reference.

#include <string>
#include <vector>

#include "json.hpp"
#include "patic/ast.hpp"
#include "patic/oracle.hpp"

namespace patic {

struct Seed {
  std::string origin;
  StatementSet keep;
  MethodUnit method_view;
  Label label;
  std::size_t queries_used = 0;  // selections evaluated up to this discovery
  std::size_t level = 0;         // recursion depth that found it
};

nlohmann::json to_json(const Seed& seed);
// Throws DataError on malformed records.
Seed seed_from_json(const nlohmann::json& j);

struct SeedSearchOptions {
  // Skip known-insufficient sets and stop early on absence checks.
  bool prune = true;
  // Also look for seeds overlapping earlier ones, which the remainder
  // recursion alone cannot reach.
  bool overlapping = true;
  // Re-check sufficiency and that every one-smaller subset fails.
  bool audit = true;
  std::size_t bruteforce_cap = 16;
};

struct SeedSearchStats {
  std::size_t selections = 0;      // subsets evaluated by the size loop
  std::size_t absence_checks = 0;  // remainder evaluations
  std::size_t audit_queries = 0;
  std::size_t audit_failures = 0;  // seeds dropped by the audit
  // Per recursion level: universe size, selections made, largest seed found.
  struct Level {
    std::size_t universe = 0;
    std::size_t selections = 0;
    std::size_t largest_seed = 0;
  };
  std::vector<Level> levels;
};

// Seeds in canonical order: by size, then lexicographically by paths.
std::vector<Seed> find_seeds(const MethodUnit& method, OracleHandle& oracle, const Label& label,
                             const SeedSearchOptions& options = {}, SeedSearchStats* stats = nullptr,
                             const std::string& origin = "");

bool is_absent(const MethodUnit& method, const StatementSet& remaining, OracleHandle& oracle, const Label& label);

std::vector<Seed> find_seeds_bruteforce(const MethodUnit& method, OracleHandle& oracle, const Label& label,
                                        const SeedSearchOptions& options = {}, const std::string& origin = "");

// Sufficient on its own, and no one-smaller subset is.
bool audit_seed(const MethodUnit& method, const StatementSet& keep, OracleHandle& oracle, const Label& label,
                std::size_t* queries = nullptr);

}  // namespace patic
