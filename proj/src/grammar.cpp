#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "patic/errors.hpp"
#include "patic/grammar.hpp"

namespace patic {

Cfg union_grammar(const std::vector<DerivationTrace>& traces) {
  if (traces.empty()) throw EmptyInput("no traces to unite");
  Cfg g;
  g.start = kStartSymbol;
  for (const auto& trace : traces)
    for (const auto& step : trace) {
      const Production& p = step.rule;
      g.rules.insert(p);
      g.nonterminals.insert(p.lhs);
      for (const auto& s : p.rhs) (s.terminal ? g.terminals : g.nonterminals).insert(s.name);
    }
  g.nonterminals.insert(g.start);
  // An optional symbol no trace ever expanded derives nothing; drop it.
  std::set<std::string> defined;
  for (const auto& p : g.rules) defined.insert(p.lhs);
  std::set<Production> kept;
  for (auto p : g.rules) {
    std::erase_if(p.rhs, [&](const Symbol& s) { return !s.terminal && s.optional && !defined.count(s.name); });
    kept.insert(std::move(p));
  }
  g.rules = std::move(kept);
  for (auto it = g.nonterminals.begin(); it != g.nonterminals.end();)
    it = defined.count(*it) || *it == g.start ? std::next(it) : g.nonterminals.erase(it);
  return g;
}

void validate(const Cfg& g) {
  if (!g.nonterminals.count(g.start)) throw DataError("start symbol <" + g.start + "> is not a non-terminal");
  std::set<std::string> has_rule;
  for (const auto& p : g.rules) {
    if (!g.nonterminals.count(p.lhs)) throw DataError("rule for unknown non-terminal <" + p.lhs + ">");
    has_rule.insert(p.lhs);
    for (const auto& s : p.rhs)
      if (!(s.terminal ? g.terminals : g.nonterminals).count(s.name))
        throw DataError("rule for <" + p.lhs + "> uses undeclared symbol " + s.name);
  }
  std::set<std::string> seen{g.start};
  std::deque<std::string> todo{g.start};
  while (!todo.empty()) {
    std::string a = todo.front();
    todo.pop_front();
    if (!has_rule.count(a)) throw DataError("reachable non-terminal <" + a + "> has no production");
    for (auto it = g.rules.lower_bound({a, {}}); it != g.rules.end() && it->lhs == a; ++it)
      for (const auto& s : it->rhs)
        if (!s.terminal && seen.insert(s.name).second) todo.push_back(s.name);
  }
}

// ---- membership ----------------------------------------------------------------

namespace {

struct Compiled {
  struct Sym {
    int id;  // non-terminal index, or terminal index
    bool terminal;
    bool optional;
  };
  struct Rule {
    int lhs;
    std::vector<Sym> rhs;
  };
  std::map<std::string, int> nt, tm;
  std::vector<Rule> rules;
  std::vector<std::vector<int>> by_lhs;
  std::vector<char> nullable;
  int start = -1;

  explicit Compiled(const Cfg& g) {
    for (const auto& n : g.nonterminals) nt.emplace(n, static_cast<int>(nt.size()));
    for (const auto& t : g.terminals) tm.emplace(t, static_cast<int>(tm.size()));
    by_lhs.resize(nt.size());
    for (const auto& p : g.rules) {
      Rule r{nt.at(p.lhs), {}};
      for (const auto& s : p.rhs) r.rhs.push_back({s.terminal ? tm.at(s.name) : nt.at(s.name), s.terminal, s.optional});
      by_lhs[r.lhs].push_back(static_cast<int>(rules.size()));
      rules.push_back(std::move(r));
    }
    start = nt.at(g.start);
    nullable.assign(nt.size(), 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& r : rules) {
        if (nullable[r.lhs]) continue;
        bool all = std::all_of(r.rhs.begin(), r.rhs.end(),
                               [&](const Sym& s) { return s.optional || (!s.terminal && nullable[s.id]); });
        if (all) nullable[r.lhs] = changed = true;
      }
    }
  }
};

struct Item {
  int rule, dot, origin;
  friend bool operator==(const Item&, const Item&) = default;
};

struct ItemHash {
  std::size_t operator()(const Item& i) const {
    return (static_cast<std::size_t>(i.rule) * 1000003u + static_cast<std::size_t>(i.dot)) * 1000003u +
           static_cast<std::size_t>(i.origin);
  }
};

struct ItemSet {
  std::vector<Item> items;
  std::unordered_set<Item, ItemHash> seen;
  bool add(const Item& i) {
    if (!seen.insert(i).second) return false;
    items.push_back(i);
    return true;
  }
};

}  // namespace

bool recognizes(const Cfg& g, const std::vector<std::string>& tokens) {
  if (!g.nonterminals.count(g.start)) return false;
  Compiled c(g);
  std::vector<int> input;
  for (const auto& t : tokens) {
    auto it = c.tm.find(t);
    if (it == c.tm.end()) return false;
    input.push_back(it->second);
  }
  const int n = static_cast<int>(input.size());
  std::vector<ItemSet> sets(static_cast<std::size_t>(n) + 1);
  // Completed non-terminals per set, for completing items predicted later in
  // the same set (nullable non-terminals).
  std::vector<std::unordered_set<int>> done_here(static_cast<std::size_t>(n) + 1);
  constexpr int kTop = -1;
  for (int r : c.by_lhs[c.start]) sets[0].add({r, 0, 0});
  for (int k = 0; k <= n; ++k) {
    auto& set = sets[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < set.items.size(); ++i) {
      Item it = set.items[i];
      const auto& rule = c.rules[static_cast<std::size_t>(it.rule)];
      if (it.dot == static_cast<int>(rule.rhs.size())) {
        // Complete.
        if (it.origin == k) done_here[static_cast<std::size_t>(k)].insert(rule.lhs);
        auto& from = sets[static_cast<std::size_t>(it.origin)].items;
        for (std::size_t j = 0; j < from.size(); ++j) {
          Item parent = from[j];
          const auto& pr = c.rules[static_cast<std::size_t>(parent.rule)];
          if (parent.dot < static_cast<int>(pr.rhs.size())) {
            const auto& s = pr.rhs[static_cast<std::size_t>(parent.dot)];
            if (!s.terminal && s.id == rule.lhs) set.add({parent.rule, parent.dot + 1, parent.origin});
          }
        }
        continue;
      }
      const auto& s = rule.rhs[static_cast<std::size_t>(it.dot)];
      if (s.optional) set.add({it.rule, it.dot + 1, it.origin});
      if (s.terminal) {
        if (k < n && input[static_cast<std::size_t>(k)] == s.id)
          sets[static_cast<std::size_t>(k) + 1].add({it.rule, it.dot + 1, it.origin});
      } else {
        for (int r : c.by_lhs[static_cast<std::size_t>(s.id)]) set.add({r, 0, k});
        if (c.nullable[static_cast<std::size_t>(s.id)] || done_here[static_cast<std::size_t>(k)].count(s.id))
          set.add({it.rule, it.dot + 1, it.origin});
      }
    }
  }
  (void)kTop;
  for (const auto& it : sets[static_cast<std::size_t>(n)].items) {
    const auto& rule = c.rules[static_cast<std::size_t>(it.rule)];
    if (rule.lhs == c.start && it.origin == 0 && it.dot == static_cast<int>(rule.rhs.size())) return true;
  }
  return false;
}

bool membership(const Cfg& g, const MethodUnit& method) { return recognizes(g, method_tokens(method)); }

// ---- sampling and enumeration ---------------------------------------------------

namespace {

using Counts = std::map<std::string, std::size_t>;

struct Deriver {
  const Cfg& g;
  std::size_t depth;
  std::mt19937_64& rng;
  std::size_t budget = 4000;  // tokens per sample
  std::vector<std::string> out;

  bool fits(const std::string& nt, const Counts& counts) const {
    auto it = counts.find(nt);
    return (it == counts.end() ? 0 : it->second) < depth;
  }

  bool derive(const std::string& a, Counts& counts) {
    ++counts[a];
    std::vector<const Production*> allowed;
    for (auto it = g.rules.lower_bound({a, {}}); it != g.rules.end() && it->lhs == a; ++it) {
      bool ok = std::all_of(it->rhs.begin(), it->rhs.end(),
                            [&](const Symbol& s) { return s.terminal || s.optional || fits(s.name, counts); });
      if (ok) allowed.push_back(&*it);
    }
    bool result = false;
    if (!allowed.empty()) {
      const Production& p = *allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(rng)];
      result = true;
      for (const auto& s : p.rhs) {
        if (s.terminal) {
          if (!s.optional || rng() % 2) out.push_back(s.name);
        } else if (!s.optional || (fits(s.name, counts) && rng() % 2)) {
          if (!derive(s.name, counts)) {
            result = false;
            break;
          }
        }
        if (out.size() > budget) {
          result = false;
          break;
        }
      }
    }
    --counts[a];
    return result;
  }
};

using Sentences = std::set<std::vector<std::string>>;

struct Enumerator {
  const Cfg& g;
  std::size_t depth;
  std::size_t cap;
  std::map<std::pair<std::string, Counts>, Sentences> memo;

  void check(const Sentences& s) const {
    if (s.size() > cap) throw CapExceeded("bounded language exceeds " + std::to_string(cap) + " sentences");
  }

  Sentences of(const std::string& a, Counts counts) {
    auto key = std::make_pair(a, counts);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Sentences result;
    if (counts[a]++ < depth) {
      for (auto it = g.rules.lower_bound({a, {}}); it != g.rules.end() && it->lhs == a; ++it) {
        Sentences partial{std::vector<std::string>{}};
        for (const auto& s : it->rhs) {
          Sentences options;
          if (s.optional) options.insert(std::vector<std::string>{});
          if (s.terminal) options.insert({s.name});
          else
            for (auto& x : of(s.name, counts)) options.insert(x);
          Sentences next;
          for (const auto& pre : partial)
            for (const auto& suf : options) {
              auto joined = pre;
              joined.insert(joined.end(), suf.begin(), suf.end());
              next.insert(std::move(joined));
              check(next);
            }
          partial = std::move(next);
          if (partial.empty()) break;
        }
        result.insert(partial.begin(), partial.end());
        check(result);
      }
    }
    memo.emplace(std::move(key), result);
    return result;
  }
};

std::string join(const std::vector<std::string>& tokens) {
  std::string s;
  for (const auto& t : tokens) (s += t) += ' ';
  return s;
}

}  // namespace

std::vector<MethodUnit> sample(const Cfg& g, std::size_t depth, std::size_t count, std::uint64_t rng_seed) {
  if (depth == 0) throw DataError("sampling depth must be at least 1");
  std::mt19937_64 rng(rng_seed);
  std::vector<MethodUnit> out;
  std::set<std::string> seen;
  const std::size_t attempts = std::max<std::size_t>(200, 50 * count);
  for (std::size_t a = 0; a < attempts && out.size() < count; ++a) {
    Deriver d{g, depth, rng};
    Counts counts;
    if (!d.derive(g.start, counts)) continue;
    try {
      MethodUnit m = parse_method(join(d.out));
      if (seen.insert(pretty(m)).second) out.push_back(std::move(m));
    } catch (const SyntaxError&) {
    }
  }
  if (out.size() < count)
    throw Exhausted("found " + std::to_string(out.size()) + " of " + std::to_string(count) +
                    " distinct methods at depth " + std::to_string(depth));
  return out;
}

std::set<std::vector<std::string>> enumerate_sentences(const Cfg& g, std::size_t depth, std::size_t cap) {
  Enumerator e{g, depth, cap, {}};
  return e.of(g.start, {});
}

// ---- emission ------------------------------------------------------------------

namespace {

std::string show(const Symbol& s) {
  std::string out;
  if (!s.terminal) {
    out = "<" + s.name + ">";
  } else if (s.name.find_first_of("|?<>") != std::string::npos || s.name == "::=") {
    out = "'" + s.name + "'";
  } else {
    out = s.name;
  }
  if (s.optional) out += "?";
  return out;
}

std::vector<std::string> emission_order(const Cfg& g) {
  std::vector<std::string> order{g.start};
  std::set<std::string> seen{g.start};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto it = g.rules.lower_bound({order[i], {}}); it != g.rules.end() && it->lhs == order[i]; ++it)
      for (const auto& s : it->rhs)
        if (!s.terminal && seen.insert(s.name).second) order.push_back(s.name);
  for (const auto& n : g.nonterminals)
    if (seen.insert(n).second) order.push_back(n);
  return order;
}

}  // namespace

std::string to_bnf(const Cfg& g) {
  std::string out;
  if (g.verified_depth) out += "// verified to derivation depth " + std::to_string(*g.verified_depth) + "\n";
  for (const auto& a : emission_order(g)) {
    std::string head = "<" + a + "> ::=";
    bool first = true;
    for (auto it = g.rules.lower_bound({a, {}}); it != g.rules.end() && it->lhs == a; ++it) {
      out += first ? head : std::string(head.size() - 1, ' ') + "|";
      for (const auto& s : it->rhs) out += " " + show(s);
      out += "\n";
      first = false;
    }
  }
  return out;
}

nlohmann::json to_json(const Cfg& g) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& p : g.rules) {
    nlohmann::json rhs = nlohmann::json::array();
    for (const auto& s : p.rhs) rhs.push_back({{"symbol", s.name}, {"terminal", s.terminal}, {"optional", s.optional}});
    rules.push_back({{"lhs", p.lhs}, {"rhs", rhs}});
  }
  return {{"start", g.start},
          {"nonterminals", g.nonterminals},
          {"terminals", g.terminals},
          {"rules", rules},
          {"verified_depth", g.verified_depth ? nlohmann::json(*g.verified_depth) : nlohmann::json(nullptr)}};
}

Cfg cfg_from_json(const nlohmann::json& j) {
  try {
    Cfg g;
    g.start = j.at("start").get<std::string>();
    g.nonterminals = j.at("nonterminals").get<std::set<std::string>>();
    g.terminals = j.at("terminals").get<std::set<std::string>>();
    for (const auto& r : j.at("rules")) {
      Production p{r.at("lhs").get<std::string>(), {}};
      for (const auto& s : r.at("rhs"))
        p.rhs.push_back({s.at("symbol").get<std::string>(), s.at("terminal").get<bool>(), s.value("optional", false)});
      g.rules.insert(std::move(p));
    }
    if (j.contains("verified_depth") && !j["verified_depth"].is_null())
      g.verified_depth = j["verified_depth"].get<std::size_t>();
    validate(g);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed grammar JSON: ") + e.what());
  }
}

}  // namespace patic
