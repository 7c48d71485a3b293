#include "patic/mutants.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "patic/errors.hpp"
#include "patic/parallel.hpp"

namespace patic {

const char* strength_name(Strength s) {
  switch (s) {
    case Strength::Weakest: return "weakest";
    case Strength::Strongest: return "strongest";
    case Strength::Ordinary: break;
  }
  return "ordinary";
}

nlohmann::json to_json(const Mutant& m) {
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : m.keep) paths.push_back(to_string(p));
  return {{"origin", m.origin},
          {"seed", m.seed_index},
          {"paths", paths},
          {"variant", pretty(m.variant)},
          {"source", pretty(m.in_context)},
          {"script", to_json(m.script)},
          {"round", m.round},
          {"validated_in_context", m.validated_in_context},
          {"strength", strength_name(m.strength)}};
}

std::optional<MethodUnit> embed(const MethodUnit& method, const StatementSet& keep, const MethodUnit& variant) {
  auto vu = statement_universe(variant);
  if (vu.size() != keep.size()) return std::nullopt;
  MethodUnit out = method;
  auto it = vu.begin();
  for (const auto& p : keep) {
    Stmt& target = statement_at(out, p);
    Stmt repl = shell(statement_at(variant, *it++));
    std::size_t nb = block_count(repl), ob = block_count(target);
    for (std::size_t b = nb; b < ob; ++b)
      if (!block(target, b).empty()) return std::nullopt;
    for (std::size_t b = 0; b < nb && b < ob; ++b) block(repl, b) = block(target, b);
    target = std::move(repl);
  }
  return out;
}

Strength classify_strength(const Mutant& mutant, OracleHandle& oracle, const Label& label) {
  if (oracle.top1_equals(mutant.variant, label)) return Strength::Strongest;
  return mutant.extension_validated ? Strength::Ordinary : Strength::Weakest;
}

namespace {

struct Node {
  MethodUnit variant;
  std::vector<EditScript> steps;
  std::optional<std::size_t> mutant;  // index into the seed's mutants
};

EditScript flatten(const std::vector<EditScript>& steps) {
  EditScript out;
  for (const auto& s : steps) out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace

std::vector<Mutant> find_mutants(const MethodUnit& method, OracleHandle& oracle, const Label& label,
                                 const std::vector<Seed>& seeds, const MutantSearchOptions& options,
                                 MutantSearchStats* stats) {
  MutantSearchStats local;
  MutantSearchStats& st = stats ? *stats : local;
  // String words from the whole method, so a seed's literal can take a word
  // that only its context uses.
  EnumerationOptions enumeration = options.enumeration;
  for (auto& w : string_literal_words(method)) enumeration.string_words.push_back(w);
  std::vector<Mutant> all;
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    const Seed& seed = seeds[si];
    std::vector<Mutant> found;
    std::map<std::string, std::size_t> valid{{pretty(seed.method_view), 0}};  // source -> round
    std::set<std::string> failed;
    std::set<std::string> seen{pretty(seed.method_view)};
    std::vector<Node> frontier{{seed.method_view, {}, std::nullopt}};
    for (std::size_t round = 1; !frontier.empty(); ++round) {
      ++st.rounds;
      struct Pending {
        std::size_t parent;
        Node node;
        MethodUnit in_context;
        std::string key;
      };
      std::vector<Pending> pending;
      std::vector<bool> parent_extended(frontier.size(), false);
      std::vector<std::pair<std::size_t, std::string>> repeats;
      for (std::size_t fi = 0; fi < frontier.size(); ++fi) {
        const Node& f = frontier[fi];
        for (auto& c : enumerate_minimal_valid_edits(f.variant, {}, enumeration)) {
          // Mutants are modification-only: rewrites that drop a node are left out.
          if (std::any_of(c.script.begin(), c.script.end(),
                          [](const EditOp& op) { return op.kind == EditOp::Kind::Delete; }))
            continue;
          std::string key = pretty(c.method);
          // Only variants at least as far from the seed count as extensions.
          if (auto v = valid.find(key); v != valid.end()) {
            if (v->second >= round) parent_extended[fi] = true;
            continue;
          }
          if (!seen.insert(key).second) {
            repeats.emplace_back(fi, key);
            continue;
          }
          Node child{std::move(c.method), f.steps, std::nullopt};
          child.steps.push_back(std::move(c.script));
          // An extension of a discarded variant is never tried: drop each
          // earlier step in turn and see whether that variant failed.
          bool blocked = false;
          for (std::size_t drop = 0; drop + 1 < child.steps.size() && !blocked; ++drop) {
            EditScript rest;
            for (std::size_t k = 0; k < child.steps.size(); ++k)
              if (k != drop) rest.insert(rest.end(), child.steps[k].begin(), child.steps[k].end());
            try {
              if (failed.count(pretty(patic::apply(rest, seed.method_view)))) blocked = true;
            } catch (const Error&) {
            }
          }
          if (blocked) {
            ++st.blocked;
            failed.insert(key);
            continue;
          }
          auto ctx = embed(method, seed.keep, child.variant);
          if (!ctx) {
            failed.insert(key);
            continue;
          }
          pending.push_back({fi, std::move(child), std::move(*ctx), key});
        }
      }
      std::vector<char> ok(pending.size(), 0);
      parallel_for(pending.size(), options.jobs,
                   [&](std::size_t i) { ok[i] = oracle.top1_equals(pending[i].in_context, label) ? 1 : 0; });
      st.validations += pending.size();
      std::vector<Node> next;
      for (std::size_t i = 0; i < pending.size(); ++i) {
        auto& p = pending[i];
        if (!ok[i]) {
          failed.insert(p.key);
          ++st.discarded;
          st.discarded_sources.push_back(pretty(p.in_context));
          continue;
        }
        parent_extended[p.parent] = true;
        valid.emplace(p.key, round);
        Mutant m;
        m.seed_index = si;
        m.origin = seed.origin;
        m.keep = seed.keep;
        m.variant = p.node.variant;
        m.in_context = std::move(p.in_context);
        m.script = flatten(p.node.steps);
        m.round = round;
        p.node.mutant = found.size();
        found.push_back(std::move(m));
        if (found.size() > options.cap)
          throw FrontierBudgetExceeded("seed " + std::to_string(si) + " exceeded " + std::to_string(options.cap) +
                                       " mutants");
        next.push_back(std::move(p.node));
      }
      for (const auto& [fi, key] : repeats)
        if (auto v = valid.find(key); v != valid.end() && v->second >= round) parent_extended[fi] = true;
      for (std::size_t fi = 0; fi < frontier.size(); ++fi)
        if (parent_extended[fi] && frontier[fi].mutant) found[*frontier[fi].mutant].extension_validated = true;
      frontier = std::move(next);
    }
    if (options.classify)
      for (auto& m : found) m.strength = classify_strength(m, oracle, label);
    for (auto& m : found) all.push_back(std::move(m));
  }
  return all;
}

}  // namespace patic
