#pragma once

// Variants of a seed reached by minimal modification-only edits that keep the
// prediction when placed back among the method's other statements.

#include <string>
#include <vector>

#include "json.hpp"
#include "patic/edit.hpp"
#include "patic/seeds.hpp"

namespace patic {

enum class Strength { Ordinary, Weakest, Strongest };
const char* strength_name(Strength s);

struct Mutant {
  std::size_t seed_index = 0;
  std::string origin;
  StatementSet keep;       // seed statements in the method
  MethodUnit variant;      // edited seed view
  MethodUnit in_context;   // variant embedded among the remaining statements
  EditScript script;       // from the seed view to the variant
  std::size_t round = 0;   // frontier round that validated it
  bool validated_in_context = true;
  bool extension_validated = false;  // some one-edit extension also validated
  Strength strength = Strength::Ordinary;
};

nlohmann::json to_json(const Mutant& m);

struct MutantSearchOptions {
  EnumerationOptions enumeration;
  std::size_t cap = 10'000;  // mutants per seed
  bool classify = true;
  unsigned jobs = 1;
};

struct MutantSearchStats {
  std::size_t rounds = 0;
  std::size_t validations = 0;
  std::size_t discarded = 0;
  std::size_t blocked = 0;  // skipped as extensions of discarded variants
  std::vector<std::string> discarded_sources;  // in-context sources that failed
};

// Places the statements of `variant` (a possibly edited restriction of
// `method` to `keep`) at the positions of `keep`, leaving every other
// statement alone. Nullopt when the variant's statement layout no longer
// lines up with the seed.
std::optional<MethodUnit> embed(const MethodUnit& method, const StatementSet& keep, const MethodUnit& variant);

std::vector<Mutant> find_mutants(const MethodUnit& method, OracleHandle& oracle, const Label& label,
                                 const std::vector<Seed>& seeds, const MutantSearchOptions& options = {},
                                 MutantSearchStats* stats = nullptr);

// Strongest when the bare variant keeps the label, else weakest when no
// extension validated, else ordinary.
Strength classify_strength(const Mutant& mutant, OracleHandle& oracle, const Label& label);

}  // namespace patic
