#include <algorithm>
#include <random>
#include <set>

#include "patic/concretize.hpp"
#include "patic/errors.hpp"
#include "patic/parallel.hpp"

namespace patic {

namespace {

const char* anchor_kind(const AnchorRef& r) { return r.kind == AnchorRef::Kind::Seed ? "seed" : "mutant"; }

nlohmann::json paths_json(const StatementSet& s) {
  auto out = nlohmann::json::array();
  for (const auto& p : s) out.push_back(to_string(p));
  return out;
}

bool has_delete(const EditScript& s) {
  return std::any_of(s.begin(), s.end(), [](const EditOp& op) { return op.kind == EditOp::Kind::Delete; });
}

struct Walk {
  const MethodUnit& upper;
  const StatementSet& anchor;
  std::vector<StatementPath> editable;
  MethodUnit anchor_view;
  EnumerationOptions enumeration;

  std::vector<EditCandidate> candidates(const MethodUnit& m, std::size_t stmt) const {
    StatementSet frozen = statement_universe(m);
    frozen.erase(editable[stmt]);
    std::vector<EditCandidate> out;
    for (auto& c : enumerate_minimal_valid_edits(m, frozen, enumeration))
      if (!has_delete(c.script) && restrict(c.method, anchor) == anchor_view) out.push_back(std::move(c));
    return out;
  }
};

}  // namespace

nlohmann::json to_json(const Interval& iv) {
  auto steps = nlohmann::json::array();
  for (const auto& m : iv.trajectory.steps) steps.push_back(pretty(m));
  return {{"anchor", {{"kind", anchor_kind(iv.anchor)}, {"index", iv.anchor.index}}},
          {"shape", iv.shape},
          {"anchor_paths", paths_json(iv.anchor_paths)},
          {"script", to_json(iv.trajectory.script)},
          {"steps", steps},
          {"lower", iv.lower},
          {"flipped", iv.flipped}};
}

nlohmann::json to_json(const Concretization& c) {
  return {{"anchor", {{"kind", anchor_kind(c.anchor)}, {"index", c.anchor.index}}},
          {"interval", c.interval},
          {"position", c.position},
          {"verified", c.verified},
          {"source", pretty(c.method)}};
}

std::vector<Interval> concretize_from(const MethodUnit& upper, const StatementSet& anchor, const AnchorRef& ref,
                                      const std::string& shape_id, OracleHandle& oracle, const Label& label,
                                      const ConcretizeConfig& config) {
  Walk walk{upper, anchor, {}, restrict(upper, anchor), config.enumeration};
  for (const auto& w : string_literal_words(upper)) walk.enumeration.string_words.push_back(w);
  for (const auto& p : statement_universe(upper))
    if (!anchor.count(p)) walk.editable.push_back(p);

  std::vector<Stmt> anchor_statements;
  for (const auto& p : anchor) anchor_statements.push_back(statement_at(upper, p));
  auto base = [&] {
    Interval iv;
    iv.anchor = ref;
    iv.shape = shape_id;
    iv.trajectory.origin = upper;
    iv.trajectory.steps.push_back(upper);
    iv.anchor_paths = anchor;
    iv.anchor_statements = anchor_statements;
    return iv;
  };

  // Starting points interleave statements: every statement's first
  // candidate, then every statement's second, and so on.
  std::vector<std::vector<EditCandidate>> first(walk.editable.size());
  for (std::size_t s = 0; s < walk.editable.size(); ++s) first[s] = walk.candidates(upper, s);
  std::vector<std::pair<std::size_t, std::size_t>> starts;
  for (std::size_t c = 0; starts.size() < config.max_trajectories; ++c) {
    bool any = false;
    for (std::size_t s = 0; s < first.size() && starts.size() < config.max_trajectories; ++s)
      if (c < first[s].size()) {
        starts.emplace_back(s, c);
        any = true;
      }
    if (!any) break;
  }
  if (starts.empty() || config.depth == 0) {
    if (!oracle.top1_equals(upper, label)) return {};
    return {base()};
  }

  std::vector<Interval> out(starts.size());
  std::vector<char> keep(starts.size(), 0);
  parallel_for(starts.size(), config.jobs, [&](std::size_t t) {
    Interval iv = base();
    if (!oracle.top1_equals(upper, label)) return;
    auto [stmt, cand] = starts[t];
    EditCandidate step = first[stmt][cand];
    std::size_t dist = method_distance(upper, step.method);
    while (true) {
      for (const auto& op : step.script) iv.trajectory.script.push_back(op);
      iv.trajectory.steps.push_back(step.method);
      if (!oracle.top1_equals(step.method, label)) {
        iv.flipped = true;
        iv.lower = iv.trajectory.steps.size() - 2;
        break;
      }
      iv.lower = iv.trajectory.steps.size() - 1;
      if (iv.trajectory.steps.size() > config.depth) break;
      // Next step: first candidate, scanning statements cyclically from the
      // one after the last edited, that moves strictly further away.
      std::optional<EditCandidate> next;
      std::size_t next_dist = 0;
      for (std::size_t k = 1; k <= walk.editable.size() && !next; ++k) {
        std::size_t s = (stmt + k) % walk.editable.size();
        for (auto& c : walk.candidates(step.method, s)) {
          std::size_t d = method_distance(upper, c.method);
          if (d > dist) {
            next = std::move(c);
            next_dist = d;
            stmt = s;
            break;
          }
        }
      }
      if (!next) break;
      step = std::move(*next);
      dist = next_dist;
    }
    out[t] = std::move(iv);
    keep[t] = 1;
  });
  std::vector<Interval> result;
  for (std::size_t t = 0; t < out.size(); ++t)
    if (keep[t]) result.push_back(std::move(out[t]));
  return result;
}

std::vector<Interval> concretize_seed(const MethodUnit& origin, const Seed& seed, std::size_t seed_index,
                                      OracleHandle& oracle, const Label& label, const ConcretizeConfig& config) {
  return concretize_from(origin, seed.keep, {AnchorRef::Kind::Seed, seed_index},
                         to_string(cf_shape_outside(origin, seed.keep)), oracle, label, config);
}

std::vector<Interval> concretize_mutant(const Mutant& mutant, std::size_t mutant_index, OracleHandle& oracle,
                                        const Label& label, const ConcretizeConfig& config) {
  return concretize_from(mutant.in_context, mutant.keep, {AnchorRef::Kind::Mutant, mutant_index},
                         to_string(cf_shape_outside(mutant.in_context, mutant.keep)), oracle, label, config);
}

std::vector<Interval> concretize_with_shapes(const MethodUnit& origin, const StatementSet& anchor, const AnchorRef& ref,
                                             OracleHandle& oracle, const Label& label,
                                             const std::vector<CfShape>& shapes, const ConcretizeConfig& config) {
  std::vector<std::vector<Interval>> per(shapes.size());
  ConcretizeConfig inner = config;
  inner.jobs = 1;
  parallel_for(shapes.size(), config.jobs, [&](std::size_t i) {
    auto q = nearest_with_shape(origin, shapes[i], anchor, config.nearest);
    if (!oracle.top1_equals(q.method, label)) return;
    per[i] = concretize_from(q.method, q.anchor_paths, ref, to_string(shapes[i]), oracle, label, inner);
  });
  std::vector<Interval> out;
  for (auto& v : per)
    for (auto& iv : v) out.push_back(std::move(iv));
  return out;
}

std::vector<Concretization> verify_all(const std::vector<Interval>& intervals, OracleHandle& oracle, const Label& label,
                                       double sample_rate, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Concretization> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    for (std::size_t pos = 0; pos <= iv.lower; ++pos) {
      // Endpoints are always checked; interior points are sampled.
      bool endpoint = pos == 0 || pos == iv.lower;
      double draw = coin(rng);
      if (!endpoint && draw >= sample_rate) continue;
      const MethodUnit& m = iv.trajectory.steps[pos];
      if (!seen.insert(pretty(m)).second) continue;
      if (!oracle.top1_equals(m, label)) continue;
      out.push_back({m, iv.anchor, i, pos, true});
    }
  }
  return out;
}

}  // namespace patic
