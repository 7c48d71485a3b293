#include <algorithm>
#include <random>

#include "patic/edit.hpp"
#include "patic/errors.hpp"
#include "patic/robustness.hpp"

namespace patic {

std::string strategy_name(Strategy s) { return s == Strategy::Patic ? "patic" : "baseline"; }

Strategy strategy_from_name(const std::string& name) {
  if (name == "patic") return Strategy::Patic;
  if (name == "baseline") return Strategy::Baseline;
  throw DataError("unknown strategy '" + name + "'");
}

nlohmann::json to_json(const AttackResult& r) {
  return {{"origin", r.origin},
          {"success", r.success},
          {"adversarial", r.adversarial ? nlohmann::json(pretty(*r.adversarial)) : nlohmann::json(nullptr)},
          {"distance", r.distance},
          {"attempts", r.attempts},
          {"trail", r.trail},
          {"predicted", r.predicted}};
}

AttackResult attack_result_from_json(const nlohmann::json& j) {
  try {
    AttackResult r;
    r.origin = j.at("origin").get<std::string>();
    r.success = j.at("success").get<bool>();
    if (j.contains("adversarial") && !j["adversarial"].is_null())
      r.adversarial = parse_method(j["adversarial"].get<std::string>());
    r.distance = j.at("distance").get<std::size_t>();
    r.attempts = j.at("attempts").get<std::size_t>();
    r.trail = j.value("trail", std::vector<std::string>{});
    r.predicted = j.value("predicted", Label{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed attack result: ") + e.what());
  } catch (const SyntaxError& e) {
    throw DataError(std::string("attack result adversarial does not parse: ") + e.what());
  }
}

std::vector<Rewrite> attack_plan(const MethodUnit& method, const std::vector<StatementSet>& seeds,
                                 const AttackOptions& options) {
  const auto& catalog = options.strategy == Strategy::Patic ? targeted_transformations() : baseline_transformations();
  for (const auto& x : options.exclude) {
    const auto& t = targeted_transformations();
    const auto& b = baseline_transformations();
    if (std::find(t.begin(), t.end(), x) == t.end() && std::find(b.begin(), b.end(), x) == b.end())
      throw DataError("unknown transformation '" + x + "'");
  }
  TransformOptions topts = options.transforms;
  if (options.strategy == Strategy::Patic) {
    StatementSet sites;
    for (const auto& s : seeds) sites.insert(s.begin(), s.end());
    topts.only = std::move(sites);
  }
  std::vector<Rewrite> plan;
  for (const auto& name : catalog) {
    if (std::find(options.exclude.begin(), options.exclude.end(), name) != options.exclude.end()) continue;
    for (auto& r : rewrites(method, name, topts)) plan.push_back(std::move(r));
  }
  std::mt19937_64 rng(options.rng_seed);
  std::shuffle(plan.begin(), plan.end(), rng);
  if (options.strategy == Strategy::Patic)
    std::stable_sort(plan.begin(), plan.end(), [](const Rewrite& a, const Rewrite& b) { return a.distance < b.distance; });
  // Two rewrites that land on the same program are one attempt.
  std::set<std::string> seen;
  std::vector<Rewrite> out;
  for (auto& r : plan)
    if (seen.insert(pretty(r.method)).second) out.push_back(std::move(r));
  return out;
}

AttackResult attack(const MethodUnit& method, OracleHandle& oracle, const Label& label,
                    const std::vector<StatementSet>& seeds, const AttackOptions& options, const std::string& origin) {
  if (!oracle.top1_equals(method, label))
    throw NotApplicable("attack needs a correctly predicted method" + (origin.empty() ? "" : " (" + origin + ")"));
  AttackResult result;
  result.origin = origin;
  for (auto& r : attack_plan(method, seeds, options)) {
    if (result.attempts >= options.budget) break;
    ++result.attempts;
    result.trail.push_back(r.transformation + "@" + to_string(r.site));
    Label got = oracle.predict(r.method).top1();
    if (got != label) {
      result.success = true;
      result.distance = r.distance;
      result.predicted = std::move(got);
      result.adversarial = std::move(r.method);
      break;
    }
  }
  if (!result.success) result.predicted = label;
  return result;
}

RobustnessReport score(const std::vector<AttackResult>& results) {
  if (results.empty()) throw EmptyInput("no attack results to score");
  RobustnessReport r;
  r.methods = results.size();
  double distance = 0, attempts = 0;
  for (const auto& a : results) {
    if (!a.success) continue;
    ++r.successes;
    distance += static_cast<double>(a.distance);
    attempts += static_cast<double>(a.attempts);
  }
  if (r.successes) {
    r.mean_distance = distance / static_cast<double>(r.successes);
    r.mean_attempts = attempts / static_cast<double>(r.successes);
  }
  r.failure_percentage = 100.0 * static_cast<double>(r.methods - r.successes) / static_cast<double>(r.methods);
  return r;
}

nlohmann::json to_json(const RobustnessReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"methods", r.methods},
          {"successes", r.successes},
          {"mean_distance", opt(r.mean_distance)},
          {"mean_attempts", opt(r.mean_attempts)},
          {"failure_percentage", r.failure_percentage}};
}

}  // namespace patic
