#pragma once

// Semantics-preserving program transformations, a small interpreter to spot
// check them, seed-targeted and blind adversarial search, and scoring.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "patic/ast.hpp"
#include "patic/oracle.hpp"

namespace patic {

// ---- transformations ----------------------------------------------------------

// Rewrites that only touch the seed statements.
inline const std::vector<std::string>& targeted_transformations() {
  static const std::vector<std::string> names{"variable-renaming", "operands-swapping", "api-substitution",
                                              "statements-reordering"};
  return names;
}

// Classic compiler-style rewrites applied anywhere.
inline const std::vector<std::string>& baseline_transformations() {
  static const std::vector<std::string> names{"control-flag-removal", "nested-condition-simplification",
                                              "hoisting",             "dead-code-elimination",
                                              "control-statement-unification", "constant-propagation",
                                              "loop-unrolling"};
  return names;
}

struct ApiSubstitution {
  std::string from;  // expression pattern; names starting with '$' bind subexpressions
  std::string to;
};

// Shipped table plus data/api_substitutions.json entries when present.
std::vector<ApiSubstitution> load_api_substitutions(const std::string& path = "");
const std::vector<ApiSubstitution>& builtin_api_substitutions();

struct TransformOptions {
  // Restricts edits to these statements (their shells); nullopt allows all.
  std::optional<StatementSet> only;
  std::vector<ApiSubstitution> api_table = builtin_api_substitutions();
  std::size_t max_unroll = 8;
};

struct Rewrite {
  std::string transformation;
  StatementPath site;       // main statement the rewrite starts from
  StatementSet touched;     // statements whose shells change, in the original method
  MethodUnit method;
  std::size_t distance = 0;
};

nlohmann::json to_json(const Rewrite& r);

// Every admissible application of one named transformation. Throws
// DataError on an unknown name.
std::vector<Rewrite> rewrites(const MethodUnit& method, const std::string& transformation,
                              const TransformOptions& options = {});
// The `index`-th rewrite; NotApplicable when there are fewer.
Rewrite apply_transformation(const MethodUnit& method, const std::string& transformation, std::size_t index = 0,
                             const TransformOptions& options = {});

// ---- interpreter -------------------------------------------------------------

struct ArrayValue;

struct Value {
  std::variant<std::monostate, std::int64_t, double, bool, std::string, std::shared_ptr<ArrayValue>> v;
  friend bool operator==(const Value& a, const Value& b);
};

struct ArrayValue {
  std::vector<Value> items;
};

std::string to_string(const Value& v);

// Observable behaviour: returned value or exception, plus the sequence of
// unknown calls with their arguments.
struct Outcome {
  std::optional<Value> returned;
  std::string exception;
  std::vector<std::string> calls;
  bool step_limit = false;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

Outcome interpret(const MethodUnit& method, const std::vector<Value>& args, std::size_t step_limit = 100000);
// Arguments matching the parameter types, from a seeded generator.
std::vector<Value> random_arguments(const MethodHeader& header, std::uint64_t seed);

// ---- attacks -------------------------------------------------------------------

enum class Strategy { Patic, Baseline };
std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct AttackOptions {
  Strategy strategy = Strategy::Patic;
  std::size_t budget = 50;
  std::uint64_t rng_seed = 0;
  std::vector<std::string> exclude;  // transformation names left out
  TransformOptions transforms;
};

struct AttackResult {
  std::string origin;
  bool success = false;
  std::optional<MethodUnit> adversarial;
  std::size_t distance = 0;
  std::size_t attempts = 0;
  std::vector<std::string> trail;  // "<transformation>@<site>" per attempt
  Label predicted;                 // top-1 on the adversarial
};

nlohmann::json to_json(const AttackResult& r);
AttackResult attack_result_from_json(const nlohmann::json& j);

// The ordered candidate list an attack walks through.
std::vector<Rewrite> attack_plan(const MethodUnit& method, const std::vector<StatementSet>& seeds,
                                 const AttackOptions& options);

// Precondition: the oracle predicts `label` on `method` (NotApplicable otherwise).
AttackResult attack(const MethodUnit& method, OracleHandle& oracle, const Label& label,
                    const std::vector<StatementSet>& seeds, const AttackOptions& options, const std::string& origin = "");

struct RobustnessReport {
  std::size_t methods = 0;
  std::size_t successes = 0;
  std::optional<double> mean_distance;  // over successes
  std::optional<double> mean_attempts;  // over successes
  double failure_percentage = 0.0;
  friend bool operator==(const RobustnessReport&, const RobustnessReport&) = default;
};

// Throws EmptyInput on an empty list.
RobustnessReport score(const std::vector<AttackResult>& results);
nlohmann::json to_json(const RobustnessReport& r);

}  // namespace patic
