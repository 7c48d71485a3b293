#pragma once

// Unit-cost tree edits over AstNode forests, edit-script replay, tree-edit
// distance with adjacent-sibling swaps, and minimal modification enumeration.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "patic/ast.hpp"

namespace patic {

struct EditOp {
  enum class Kind { Insert, Delete, Rename, Swap };

  Kind kind = Kind::Rename;
  // Insert/Swap: path of the parent; Delete/Rename: path of the node itself.
  // On a forest the first step selects the top-level tree and an empty parent
  // path addresses the top-level sequence; on a single tree the root is {}.
  TreePath path;
  std::uint32_t index = 0;  // Insert: child position; Swap: left child (swapped with index + 1)
  std::uint32_t adopt = 0;  // Insert: number of existing children the new node takes over
  std::string label;        // Insert/Rename

  friend bool operator==(const EditOp&, const EditOp&) = default;

  static EditOp insert(TreePath parent, std::uint32_t index, std::string label, std::uint32_t adopt = 0);
  static EditOp remove(TreePath node);
  static EditOp rename(TreePath node, std::string label);
  static EditOp swap(TreePath parent, std::uint32_t index);
};

using EditScript = std::vector<EditOp>;
using Forest = std::vector<AstNode>;

// Generic application; throws PathError when a path or index does not exist.
Forest apply(const EditOp& op, const Forest& forest);
AstNode apply(const EditOp& op, const AstNode& tree);
AstNode apply(const EditScript& script, const AstNode& tree);

// Application to a method through its tree view; throws ArityError when the
// edited tree no longer describes a method.
MethodUnit apply(const EditOp& op, const MethodUnit& method);
MethodUnit apply(const EditScript& script, const MethodUnit& method);

struct EditTrajectory {
  MethodUnit origin;
  EditScript script;
  std::vector<MethodUnit> steps;  // steps[0] == origin, steps[i] = apply(script[i-1], steps[i-1])
};

EditTrajectory replay(const MethodUnit& origin, const EditScript& script);

nlohmann::json to_json(const EditOp& op);
nlohmann::json to_json(const EditScript& script);
EditOp edit_op_from_json(const nlohmann::json& j);
EditScript edit_script_from_json(const nlohmann::json& j);

// ---- distance -------------------------------------------------------------------

struct DistanceOptions {
  // Inputs whose larger side has at most this many nodes get an exact search
  // seeded with the DP value; bigger inputs, and searches that run out of
  // expansions, report the swap-aware forest DP, which is an upper bound.
  std::size_t exact_node_limit = 8;
  std::size_t exact_expansion_limit = 20'000;
};

std::size_t tree_edit_distance(const AstNode& a, const AstNode& b, const DistanceOptions& options = {});
std::size_t forest_edit_distance(const Forest& a, const Forest& b, const DistanceOptions& options = {});

// The two distance engines, exposed for tests and diagnostics.
std::size_t forest_distance_dp(const Forest& a, const Forest& b, bool with_swaps = true);
// Returns the exact distance, or fallback if the search exceeds max_expansions.
std::size_t forest_distance_search(const Forest& a, const Forest& b, std::size_t upper_bound,
                                   std::size_t max_expansions, bool* exhausted = nullptr);

std::size_t method_distance(const MethodUnit& a, const MethodUnit& b, const DistanceOptions& options = {});

// ---- enumeration ----------------------------------------------------------------

struct Vocabulary {
  std::vector<std::string> words;

  static Vocabulary load(const std::string& path);
  static Vocabulary builtin();
};

struct EnumerationOptions {
  Vocabulary vocabulary = Vocabulary::builtin();
  bool rename_identifiers = true;
  bool rename_types = true;
  bool rename_literals = true;
  bool rename_operators = true;
  bool structural = true;  // Binary <-> Index rewrites
  std::size_t string_word_pool = 8;  // vocabulary words tried per word of a string literal
  // Further words tried per word of a string literal, after the method's own.
  std::vector<std::string> string_words;
};

struct EditCandidate {
  MethodUnit method;
  EditScript script;
};

// Words of every string literal in the method, in order of appearance.
std::vector<std::string> string_literal_words(const MethodUnit& method);

// In-method identifiers plus vocabulary words; reserved words excluded.
std::vector<std::string> identifier_candidates(const MethodUnit& method, const Vocabulary& vocab);
std::vector<std::string> type_candidates(const MethodUnit& method, const Vocabulary& vocab);

// Modification-only edits of minimal length per edit site, applied to shells of
// statements outside `frozen` (frozen empty: every statement is editable).
// Results are deduplicated by canonical source and never equal the input.
std::vector<EditCandidate> enumerate_minimal_valid_edits(const MethodUnit& method, const StatementSet& frozen,
                                                         const EnumerationOptions& options = {});

// Tree paths (into to_tree(method)) of nodes that belong to the shell of an
// editable statement: the statement node and its non-block descendants.
std::vector<TreePath> editable_nodes(const MethodUnit& method, const StatementSet& frozen);

}  // namespace patic
