#pragma once

// Full programs around a seed or mutant that keep the prediction: edit
// trajectories away from an upper end until the label flips, control-flow
// shape switching, and a final verification pass.

#include <string>
#include <vector>

#include "json.hpp"
#include "patic/edit.hpp"
#include "patic/mutants.hpp"
#include "patic/seeds.hpp"

namespace patic {

// ---- control-flow shapes --------------------------------------------------------

struct ShapeNode {
  enum class Kind { If, IfElse, While, For, Try };
  Kind kind = Kind::If;
  std::size_t catches = 1;     // Try only
  bool has_finally = false;    // Try only
  std::vector<std::vector<ShapeNode>> blocks;
  friend bool operator==(const ShapeNode&, const ShapeNode&) = default;
};

// Nesting forest of control statements with everything else erased.
struct CfShape {
  std::vector<ShapeNode> roots;
  friend bool operator==(const CfShape&, const CfShape&) = default;
};

std::string to_string(const CfShape& shape);
CfShape shape_from_string(const std::string& text);
CfShape cf_shape(const MethodUnit& method);
// Shape of the method with the statements at `anchor` set aside.
CfShape cf_shape_outside(const MethodUnit& method, const StatementSet& anchor);
std::size_t block_slots(const CfShape& shape);

// Every shape of nesting depth at most two over if, if-else, while, for and
// try-catch with the inner construct in the first block: 30 shapes.
std::vector<CfShape> shape_catalog();
// Catalog plus `extra` when it is not already listed.
std::vector<CfShape> shape_catalog_with(const CfShape& extra);

// ---- nearest program with a given shape -----------------------------------------

struct ShapeAssignment {
  // For each placed unit (non-anchor non-control statements in preorder, with
  // the anchor core as one unit), the index of the gap it goes to. Gaps are
  // the positions between control statements, in textual order.
  std::vector<std::size_t> gaps;
};

struct NearestShapeResult {
  MethodUnit method;
  std::size_t distance = 0;
  StatementSet anchor_paths;  // where the anchor statements ended up
  ShapeAssignment assignment;
  bool exhaustive = true;     // false when local search stood in for enumeration
};

struct NearestShapeOptions {
  std::size_t exhaustive_limit = 4000;  // assignments tried before falling back to local search
};

// Closest method to `origin` with control-flow shape `shape` outside the
// anchor, using origin's non-control statements and empty statements as
// padding. The anchor statements stay contiguous at top level.
NearestShapeResult nearest_with_shape(const MethodUnit& origin, const CfShape& shape, const StatementSet& anchor = {},
                                      const NearestShapeOptions& options = {});

// Builds the candidate for one assignment; nullopt when it breaks the
// ordering or places the anchor core below top level.
std::optional<NearestShapeResult> realize_shape(const MethodUnit& origin, const CfShape& shape,
                                                const StatementSet& anchor, const ShapeAssignment& assignment);
std::size_t shape_gap_count(const CfShape& shape);
std::vector<std::size_t> top_level_gaps(const CfShape& shape);
std::size_t placement_units(const MethodUnit& origin, const StatementSet& anchor);

// ---- intervals --------------------------------------------------------------------

struct AnchorRef {
  enum class Kind { Seed, Mutant };
  Kind kind = Kind::Seed;
  std::size_t index = 0;
  friend bool operator==(const AnchorRef&, const AnchorRef&) = default;
};

struct Interval {
  AnchorRef anchor;
  std::string shape;            // shape id of the upper end
  EditTrajectory trajectory;    // steps[0] is the upper end
  std::size_t lower = 0;        // index of the threshold method in steps
  bool flipped = false;         // the step after `lower` changed the label
  StatementSet anchor_paths;    // anchor statements in every step
  std::vector<Stmt> anchor_statements;

  const MethodUnit& upper_method() const { return trajectory.steps.front(); }
  const MethodUnit& lower_method() const { return trajectory.steps.at(lower); }
};

nlohmann::json to_json(const Interval& interval);

struct ConcretizeConfig {
  std::size_t depth = 3;
  std::size_t max_trajectories = 8;
  double sample_rate = 1.0;
  std::uint64_t rng_seed = 1;
  unsigned jobs = 1;
  EnumerationOptions enumeration;
  NearestShapeOptions nearest;
};

struct Concretization {
  MethodUnit method;
  AnchorRef anchor;
  std::size_t interval = 0;
  std::size_t position = 0;
  bool verified = false;
};

nlohmann::json to_json(const Concretization& c);

// Trajectories from `upper` editing everything but the anchor statements.
std::vector<Interval> concretize_from(const MethodUnit& upper, const StatementSet& anchor, const AnchorRef& ref,
                                      const std::string& shape_id, OracleHandle& oracle, const Label& label,
                                      const ConcretizeConfig& config);

std::vector<Interval> concretize_seed(const MethodUnit& origin, const Seed& seed, std::size_t seed_index,
                                      OracleHandle& oracle, const Label& label, const ConcretizeConfig& config = {});
std::vector<Interval> concretize_mutant(const Mutant& mutant, std::size_t mutant_index, OracleHandle& oracle,
                                        const Label& label, const ConcretizeConfig& config = {});
// One run per shape, from that shape's nearest program; shapes whose nearest
// program already loses the label are skipped.
std::vector<Interval> concretize_with_shapes(const MethodUnit& origin, const StatementSet& anchor, const AnchorRef& ref,
                                             OracleHandle& oracle, const Label& label,
                                             const std::vector<CfShape>& shapes, const ConcretizeConfig& config = {});

std::vector<Concretization> verify_all(const std::vector<Interval>& intervals, OracleHandle& oracle, const Label& label,
                                       double sample_rate, std::uint64_t rng_seed = 1);

}  // namespace patic
