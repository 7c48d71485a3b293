#include <algorithm>
#include <limits>

#include "patic/edit.hpp"
#include "patic/errors.hpp"
#include "patic/oracle.hpp"

namespace patic {

namespace {

constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;

// The method name is the prediction target, so it never counts as drift.
AstNode header_tree(MethodHeader h) {
  h.name.clear();
  return to_tree(h);
}

std::size_t shell_cost(const AstNode& a, const AstNode& b) {
  if (a == b) return 0;
  return forest_distance_dp({a}, {b});
}

// Whether every method statement pairs with an equal anchor statement, in
// order, with every fragment statement paired.
bool embeds_exactly(const std::vector<AstNode>& a, const std::vector<bool>& required, const std::vector<AstNode>& m) {
  // reach[j]: m[0..j) can be aligned with the anchor prefix seen so far.
  std::vector<char> reach(m.size() + 1, 0);
  reach[0] = 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<char> next(m.size() + 1, 0);
    for (std::size_t j = 0; j <= m.size(); ++j) {
      if (!reach[j]) continue;
      if (!required[i]) next[j] = 1;
      if (j < m.size() && a[i] == m[j]) next[j + 1] = 1;
    }
    reach = std::move(next);
  }
  return reach[m.size()];
}

Label label_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw SpecError(std::string(what) + " must be an array of subtokens");
  Label out;
  for (const auto& t : j) {
    if (!t.is_string() || t.get<std::string>().empty()) throw SpecError(std::string(what) + " has a bad subtoken");
    out.push_back(t.get<std::string>());
  }
  return out;
}

MethodUnit anchor_from_json(const nlohmann::json& j) {
  if (!j.is_string()) throw SpecError("anchor must be method source");
  try {
    return parse_method(j.get<std::string>());
  } catch (const SyntaxError& e) {
    throw SpecError(std::string("anchor does not parse: ") + e.what());
  }
}

}  // namespace

std::vector<AstNode> shell_sequence(const MethodUnit& method) {
  return shell_sequence(method, statement_universe(method));
}

std::vector<AstNode> shell_sequence(const MethodUnit& method, const StatementSet& only) {
  std::vector<AstNode> out;
  for (const auto& p : only) out.push_back(to_tree(shell(statement_at(method, p))));
  return out;
}

// Aligns the anchor's statements against the method's in order. Fragment
// statements must be matched, with their summed distance within the
// tolerance. Other anchor statements may be dropped for free; method
// statements with no partner cost their size. Returns the least drift.
std::optional<std::size_t> rule_drift(const MockRule& rule, const MethodUnit& anchor, const MethodUnit& method) {
  StatementSet universe = statement_universe(anchor);
  std::vector<AstNode> a;
  std::vector<bool> required;
  for (const auto& p : universe) {
    a.push_back(to_tree(shell(statement_at(anchor, p))));
    required.push_back(rule.fragment.count(p) > 0);
  }
  std::vector<AstNode> m = shell_sequence(method);
  const std::size_t tol = rule.fragment_tolerance;
  const std::size_t header_cost = shell_cost(header_tree(anchor.header), header_tree(method.header));
  if (tol == 0) {
    // Exact-match alignments settle most queries without any distance work:
    // fragment statements must embed in order, and a full embedding of the
    // method into the anchor costs nothing.
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.size() && j <= m.size(); ++i) {
      if (!required[i]) continue;
      while (j < m.size() && !(m[j] == a[i])) ++j;
      if (j == m.size()) return std::nullopt;
      ++j;
    }
    if (embeds_exactly(a, required, m)) {
      if (rule.budget && header_cost > *rule.budget) return std::nullopt;
      return header_cost;
    }
  }
  const std::size_t n = a.size(), k = m.size();
  // dp[i][j][t]: least drift aligning a[0..i) with m[0..j) using t fragment
  // tolerance.
  std::vector<std::size_t> dp((n + 1) * (k + 1) * (tol + 1), kInf);
  auto at = [&](std::size_t i, std::size_t j, std::size_t t) -> std::size_t& {
    return dp[(i * (k + 1) + j) * (tol + 1) + t];
  };
  std::vector<std::size_t> size_of(k);
  for (std::size_t j = 0; j < k; ++j) size_of[j] = m[j].size();
  at(0, 0, 0) = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= k; ++j) {
      for (std::size_t t = 0; t <= tol; ++t) {
        std::size_t cur = at(i, j, t);
        if (cur >= kInf) continue;
        if (j < k) at(i, j + 1, t) = std::min(at(i, j + 1, t), cur + size_of[j]);
        if (i < n && !required[i]) at(i + 1, j, t) = std::min(at(i + 1, j, t), cur);
        if (i < n && j < k) {
          if (required[i]) {
            if (a[i] == m[j]) {
              at(i + 1, j + 1, t) = std::min(at(i + 1, j + 1, t), cur);
            } else if (t < tol) {
              std::size_t c = shell_cost(a[i], m[j]);
              if (t + c <= tol) at(i + 1, j + 1, t + c) = std::min(at(i + 1, j + 1, t + c), cur);
            }
          } else {
            std::size_t c = shell_cost(a[i], m[j]);
            at(i + 1, j + 1, t) = std::min(at(i + 1, j + 1, t), cur + c);
          }
        }
      }
    }
  }
  std::size_t best = kInf;
  for (std::size_t t = 0; t <= tol; ++t) best = std::min(best, at(n, k, t));
  if (best >= kInf) return std::nullopt;
  best += header_cost;
  if (rule.budget && best > *rule.budget) return std::nullopt;
  return best;
}

MockEvaluation evaluate_mock(const MockModelSpec& spec, const MethodUnit& method) {
  for (std::size_t r = 0; r < spec.rules.size(); ++r) {
    const auto& rule = spec.rules[r];
    const MethodUnit& anchor = rule.anchor ? *rule.anchor : *spec.anchor;
    if (auto d = rule_drift(rule, anchor, method)) return {true, r, *d};
  }
  return {};
}

Prediction mock_predict(const MockModelSpec& spec, const MethodUnit& method) {
  auto ev = evaluate_mock(spec, method);
  if (!ev.fired) return Prediction{{{spec.default_label, 0.9}}};
  const Label& label = spec.rules[ev.rule].label;
  if (label == spec.default_label || spec.default_label.empty()) return Prediction{{{label, 0.9}}};
  return Prediction{{{label, 0.9}, {spec.default_label, 0.1}}};
}

void MockModelSpec::validate() const {
  if (rules.empty() && default_label.empty()) throw SpecError("mock needs rules or a default label");
  if (default_label.empty()) throw SpecError("mock needs a default label");
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& rule = rules[r];
    const MethodUnit* a = rule.anchor ? &*rule.anchor : (anchor ? &*anchor : nullptr);
    if (!a) throw SpecError("rule " + std::to_string(r) + " has no anchor");
    if (rule.label.empty()) throw SpecError("rule " + std::to_string(r) + " has an empty label");
    for (const auto& p : rule.fragment)
      if (!contains_path(*a, p))
        throw SpecError("rule " + std::to_string(r) + " fragment path " + to_string(p) + " is not in its anchor");
  }
}

MockModelSpec MockModelSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SpecError("mock spec must be an object");
  MockModelSpec spec;
  if (j.contains("anchor")) spec.anchor = anchor_from_json(j["anchor"]);
  if (j.contains("default_label")) spec.default_label = label_from_json(j["default_label"], "default_label");
  if (j.contains("rules")) {
    if (!j["rules"].is_array()) throw SpecError("rules must be an array");
    for (const auto& r : j["rules"]) {
      if (!r.is_object()) throw SpecError("rule must be an object");
      MockRule rule;
      if (r.contains("anchor")) rule.anchor = anchor_from_json(r["anchor"]);
      if (r.contains("fragment")) {
        if (!r["fragment"].is_array()) throw SpecError("fragment must be an array of paths");
        for (const auto& p : r["fragment"]) {
          if (!p.is_string()) throw SpecError("fragment path must be a string");
          try {
            rule.fragment.insert(parse_path(p.get<std::string>()));
          } catch (const PathError& e) {
            throw SpecError(e.what());
          }
        }
      }
      if (r.contains("budget") && !r["budget"].is_null()) {
        if (!r["budget"].is_number_unsigned()) throw SpecError("budget must be a non-negative integer or null");
        rule.budget = r["budget"].get<std::size_t>();
      }
      if (r.contains("fragment_tolerance")) {
        if (!r["fragment_tolerance"].is_number_unsigned()) throw SpecError("fragment_tolerance must be non-negative");
        rule.fragment_tolerance = r["fragment_tolerance"].get<std::size_t>();
      }
      rule.label = label_from_json(r.value("label", nlohmann::json::array()), "label");
      spec.rules.push_back(std::move(rule));
    }
  }
  spec.validate();
  return spec;
}

nlohmann::json MockModelSpec::to_json() const {
  nlohmann::json j;
  if (anchor) j["anchor"] = pretty(*anchor);
  j["default_label"] = default_label;
  j["rules"] = nlohmann::json::array();
  for (const auto& rule : rules) {
    nlohmann::json r;
    if (rule.anchor) r["anchor"] = pretty(*rule.anchor);
    r["fragment"] = nlohmann::json::array();
    for (const auto& p : rule.fragment) r["fragment"].push_back(to_string(p));
    r["budget"] = rule.budget ? nlohmann::json(*rule.budget) : nlohmann::json(nullptr);
    r["fragment_tolerance"] = rule.fragment_tolerance;
    r["label"] = rule.label;
    j["rules"].push_back(std::move(r));
  }
  return j;
}

MockBackend::MockBackend(MockModelSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Prediction MockBackend::predict(const std::string& source) { return mock_predict(spec_, parse_method(source)); }

std::unique_ptr<OracleHandle> make_monotone_mock(MockModelSpec spec, bool cache_enabled) {
  return std::make_unique<OracleHandle>(std::make_unique<MockBackend>(std::move(spec)), cache_enabled);
}

}  // namespace patic
