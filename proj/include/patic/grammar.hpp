#pragma once

// Pattern grammars: derivation traces of methods under a Java-subset host
// grammar, their union, BNF and JSON emission, chart-parser membership and
// bounded-depth sampling.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "patic/ast.hpp"

namespace patic {

struct Symbol {
  std::string name;   // non-terminal name without brackets, or terminal token
  bool terminal = true;
  bool optional = false;  // zero or one occurrence
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

Symbol term(std::string token);
Symbol nonterm(std::string name, bool optional = false);

struct Production {
  std::string lhs;
  std::vector<Symbol> rhs;
  friend auto operator<=>(const Production&, const Production&) = default;
  friend bool operator==(const Production&, const Production&) = default;
};

struct Cfg {
  std::string start;
  std::set<std::string> nonterminals;
  std::set<std::string> terminals;
  std::set<Production> rules;
  std::optional<std::size_t> verified_depth;  // sidecar: depth the samples were checked at

  friend bool operator==(const Cfg&, const Cfg&) = default;
};

// One applied production, with the optional right-hand positions it left out.
struct TraceStep {
  Production rule;
  std::vector<std::size_t> skipped;
  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

// Productions in leftmost-derivation order.
using DerivationTrace = std::vector<TraceStep>;

inline constexpr const char* kStartSymbol = "seed declaration";

// Anchor statements of a concretization: they are kept verbatim under
// <seedN core> with room for other statements around and between them.
struct SeedAnchor {
  std::size_t family = 1;  // N in <seedN core>
  StatementSet paths;
};

// Tokens of the method as the host grammar spells them.
std::vector<std::string> method_tokens(const MethodUnit& method);

DerivationTrace extract_trace(const MethodUnit& method, const std::optional<SeedAnchor>& anchor = std::nullopt);
// Rebuilds the sentence a trace derives; throws DataError on a trace that
// does not form a leftmost derivation from `start`.
std::vector<std::string> replay_trace(const DerivationTrace& trace, const std::string& start = kStartSymbol);

// Throws EmptyInput on an empty list.
Cfg union_grammar(const std::vector<DerivationTrace>& traces);
// Checks the grammar invariants; throws DataError.
void validate(const Cfg& g);

bool recognizes(const Cfg& g, const std::vector<std::string>& tokens);
bool membership(const Cfg& g, const MethodUnit& method);

// Every non-terminal occurs at most `depth` times on any root-to-leaf path of
// a derivation counted here.
std::vector<MethodUnit> sample(const Cfg& g, std::size_t depth, std::size_t count, std::uint64_t rng_seed);
// All sentences of the depth-bounded language; CapExceeded beyond `cap`.
std::set<std::vector<std::string>> enumerate_sentences(const Cfg& g, std::size_t depth, std::size_t cap = 100000);

std::string to_bnf(const Cfg& g);
nlohmann::json to_json(const Cfg& g);
Cfg cfg_from_json(const nlohmann::json& j);

}  // namespace patic
