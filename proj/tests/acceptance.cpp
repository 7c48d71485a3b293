// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "patic/augment.hpp"
#include "patic/concretize.hpp"
#include "patic/errors.hpp"
#include "patic/edit.hpp"
#include "patic/grammar.hpp"
#include "patic/mutants.hpp"
#include "patic/robustness.hpp"
#include "patic/seeds.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace patic;
namespace fs = std::filesystem;

namespace {

const Label kL{"save", "bitmap"};

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::size_t binom(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::set<StatementSet> keeps(const std::vector<Seed>& seeds) {
  std::set<StatementSet> out;
  for (const auto& s : seeds) out.insert(s.keep);
  return out;
}

std::string str(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

// ---- seeds: exactness, per-level bound, audit ---------------------------------

void seeds_criteria() {
  std::mt19937_64 rng(101);
  std::size_t agree = 0, instances = 500, levels = 0, violations = 0, seeds_total = 0, audited = 0;
  std::vector<std::pair<MethodUnit, MockModelSpec>> cases;
  for (std::size_t i = 0; i < instances; ++i) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(3, 10)(rng);
    MethodUnit m = oracle::random_method(rng, n);
    cases.emplace_back(m, oracle::random_fragment_mock(rng, m, kL));
  }
  std::vector<std::vector<Seed>> found(instances);
  auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < instances; ++i) {
    auto& [m, spec] = cases[i];
    auto fast = make_monotone_mock(spec);
    auto slow = make_monotone_mock(spec);
    SeedSearchStats stats;
    found[i] = find_seeds(m, *fast, kL, {}, &stats);
    if (keeps(found[i]) == keeps(find_seeds_bruteforce(m, *slow, kL))) ++agree;
    for (const auto& lv : stats.levels) {
      std::size_t bound = 0;
      for (std::size_t k = 1; k <= lv.largest_seed; ++k) bound += binom(lv.universe, k);
      ++levels;
      if (lv.selections > bound) ++violations;
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  verdict(1, agree == instances && secs < 60.0,
          std::to_string(agree) + "/" + std::to_string(instances) + " instances match the exhaustive search in " +
              str(secs) + "s");
  verdict(2, violations == 0,
          std::to_string(violations) + " of " + std::to_string(levels) + " levels exceed the subset-count bound");
  for (std::size_t i = 0; i < instances; ++i) {
    auto fresh = make_monotone_mock(cases[i].second);
    for (const auto& s : found[i]) {
      ++seeds_total;
      if (audit_seed(cases[i].first, s.keep, *fresh, kL)) ++audited;
    }
  }
  verdict(3, audited == seeds_total && seeds_total > 0,
          std::to_string(audited) + "/" + std::to_string(seeds_total) + " seeds pass the audit");
}

// ---- tree edit distance --------------------------------------------------------

void distance_criterion() {
  std::mt19937_64 rng(404);
  std::size_t agree = 0, pairs = 1000;
  for (std::size_t i = 0; i < pairs; ++i) {
    std::size_t edits = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
    auto [a, b] = oracle::random_pair(rng, 8, edits);
    auto expected = oracle::bfs_distance({a}, {b}, edits);
    if (expected && tree_edit_distance(a, b) == *expected) ++agree;
  }
  std::size_t anchor =
      tree_edit_distance(to_tree(parse_expression("a + b")), to_tree(parse_expression("a[b]")));
  verdict(4, agree == pairs && anchor == 2,
          std::to_string(agree) + "/" + std::to_string(pairs) + " pairs match breadth-first search; d(a+b, a[b]) = " +
              std::to_string(anchor));
}

// ---- grammar soundness and coverage ---------------------------------------------

void grammar_criteria() {
  std::mt19937_64 rng(505);
  const std::size_t scenarios = 20, per_scenario = 200;
  std::size_t sampled = 0, labelled = 0, concretizations = 0, members = 0, short_scenarios = 0;
  for (std::size_t sc = 0; sc < scenarios; ++sc) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(4, 7)(rng);
    MethodUnit m = oracle::random_method(rng, n);
    auto oracle_h = make_monotone_mock(oracle::random_fragment_mock(rng, m, kL));
    auto seeds = find_seeds(m, *oracle_h, kL);
    std::vector<DerivationTrace> traces;
    std::vector<MethodUnit> verified;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      ConcretizeConfig cfg;
      cfg.depth = 2;
      cfg.max_trajectories = 3;
      auto ivs = concretize_seed(m, seeds[i], i, *oracle_h, kL, cfg);
      for (const auto& c : verify_all(ivs, *oracle_h, kL, 1.0)) {
        traces.push_back(extract_trace(c.method, SeedAnchor{i + 1, ivs[c.interval].anchor_paths}));
        verified.push_back(c.method);
      }
    }
    if (traces.empty()) {
      ++short_scenarios;
      continue;
    }
    Cfg g = union_grammar(traces);
    for (const auto& v : verified) {
      ++concretizations;
      if (membership(g, v)) ++members;
    }
    std::vector<MethodUnit> samples;
    for (std::size_t depth = 3; depth <= 5 && samples.size() < per_scenario; ++depth) {
      try {
        samples = sample(g, depth, per_scenario, 7 + sc);
      } catch (const Exhausted&) {
      }
    }
    if (samples.size() < per_scenario) ++short_scenarios;
    for (const auto& s : samples) {
      ++sampled;
      if (oracle_h->top1_equals(s, kL)) ++labelled;
    }
  }
  verdict(5, short_scenarios == 0 && sampled == labelled && sampled >= scenarios * per_scenario,
          std::to_string(labelled) + "/" + std::to_string(sampled) + " samples keep the label across " +
              std::to_string(scenarios - short_scenarios) + "/" + std::to_string(scenarios) + " full scenarios");
  verdict(6, concretizations > 0 && members == concretizations,
          std::to_string(members) + "/" + std::to_string(concretizations) +
              " verified concretizations are in their union grammar");
}

// ---- pruning -------------------------------------------------------------------

// In-context sources of every mutant, searched with a small vocabulary; a cap
// overflow is its own outcome.
std::set<std::string> mutant_sources(const MethodUnit& m, const MockModelSpec& spec, const std::vector<Seed>& seeds) {
  MutantSearchOptions opts;
  opts.enumeration.vocabulary.words = {"data", "value"};
  opts.enumeration.string_word_pool = 1;
  auto oracle_h = make_monotone_mock(spec);
  std::set<std::string> out;
  try {
    for (const auto& mu : find_mutants(m, *oracle_h, kL, seeds, opts)) out.insert(pretty(mu.in_context));
  } catch (const FrontierBudgetExceeded&) {
    out.insert("<cap exceeded>");
  }
  return out;
}

void pruning_criterion() {
  std::mt19937_64 rng(707);
  const std::size_t instances = 200;
  std::size_t same = 0, fewer = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(5, 10)(rng);
    MethodUnit m = oracle::random_method(rng, n);
    auto spec = oracle::random_fragment_mock(rng, m, kL);
    // A drift budget keeps the mutant frontier finite.
    for (auto& r : spec.rules) r.budget = 1;
    auto on = make_monotone_mock(spec, false);
    auto off = make_monotone_mock(spec, false);
    SeedSearchOptions no_prune;
    no_prune.prune = false;
    auto a = find_seeds(m, *on, kL);
    auto b = find_seeds(m, *off, kL, no_prune);
    std::size_t qa = on->query_log().size(), qb = off->query_log().size();
    if (keeps(a) == keeps(b) && mutant_sources(m, spec, a) == mutant_sources(m, spec, b)) ++same;
    if (qa < qb) ++fewer;
  }
  verdict(7, same == instances && fewer * 100 >= instances * 95,
          std::to_string(same) + "/" + std::to_string(instances) + " identical seed and mutant sets; " +
              std::to_string(fewer) + "/" + std::to_string(instances) + " use strictly fewer queries with pruning");
}

}  // namespace

void robustness_criteria();
void semantics_criterion();
void augment_criterion();
void determinism_criterion();

int main() {
  seeds_criteria();
  distance_criterion();
  grammar_criteria();
  pruning_criterion();
  robustness_criteria();
  semantics_criterion();
  augment_criterion();
  determinism_criterion();
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}

// ---- robustness ----------------------------------------------------------------

namespace {

struct Form {
  const char* type;
  const char* op;
  const char* literal;
};

const Form kForms[] = {{"int", "+", "3"}, {"long", "*", "7"}, {"boolean", "||", "false"},
                       {"boolean", "&&", "true"}, {"int", "*", "5"}};

// A method whose model fires on one or two top-level statements holding a
// commutative expression, surrounded by statements only blind rewrites touch.
std::pair<MethodUnit, StatementSet> fragment_method(std::mt19937_64& rng, std::size_t index) {
  auto coin = [&] { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; };
  const Form& f = kForms[std::uniform_int_distribution<std::size_t>(0, std::size(kForms) - 1)(rng)];
  bool constant = std::uniform_int_distribution<int>(0, 9)(rng) < 7;
  std::string ty = f.type;
  std::string params = ty + " b, int n";
  if (!constant) params = ty + " a, " + params;
  std::vector<std::string> body;
  if (constant) body.push_back(ty + " a = " + f.literal + ";");
  body.push_back("log(n);");
  std::size_t first = body.size();
  body.push_back(ty + " s = a " + f.op + " b;");
  bool second = coin();
  if (second) body.push_back("emit(s);");
  if (coin()) body.push_back("for (int i = 0; i < " + std::to_string(2 + index % 3) + "; i++) { tick(i); }");
  if (coin()) body.push_back("if (false) { trace(n); }");
  if (coin()) body.push_back("if (n > 0) { if (n > 5) { mark(n); } }");
  std::string src = "void compute" + std::to_string(index) + "(" + params + ") {";
  for (const auto& s : body) src += " " + s;
  src += " }";
  StatementSet fragment{StatementPath{{0, static_cast<std::uint32_t>(first)}}};
  if (second) fragment.insert(StatementPath{{0, static_cast<std::uint32_t>(first + 1)}});
  return {parse_method(src), fragment};
}

}  // namespace

void robustness_criteria() {
  std::mt19937_64 rng(808);
  const std::size_t methods = 100;
  std::vector<AttackResult> patic_runs, baseline_runs;
  std::size_t correct = 0, close = 0;
  for (std::size_t i = 0; i < methods; ++i) {
    auto [m, fragment] = fragment_method(rng, i);
    MockModelSpec spec;
    MockRule rule;
    rule.anchor = m;
    rule.fragment = fragment;
    rule.label = kL;
    spec.rules.push_back(rule);
    spec.default_label = {"other"};
    auto oracle_h = make_monotone_mock(spec);
    if (!oracle_h->top1_equals(m, kL)) continue;
    ++correct;
    std::vector<StatementSet> seeds;
    for (const auto& s : find_seeds(m, *oracle_h, kL)) seeds.push_back(s.keep);
    AttackOptions opts;
    opts.rng_seed = i;
    auto p = attack(m, *oracle_h, kL, seeds, opts, "m" + std::to_string(i));
    if (p.success && p.distance <= 2) ++close;
    patic_runs.push_back(p);
    opts.strategy = Strategy::Baseline;
    baseline_runs.push_back(attack(m, *oracle_h, kL, seeds, opts, "m" + std::to_string(i)));
  }
  auto ps = score(patic_runs);
  auto bs = score(baseline_runs);
  bool ok = correct > 0 && close == correct && ps.mean_attempts && *ps.mean_attempts <= 5.0 && bs.mean_attempts &&
            *bs.mean_attempts > *ps.mean_attempts;
  verdict(8, ok,
          std::to_string(close) + "/" + std::to_string(correct) + " adversarials within distance 2; mean attempts " +
              (ps.mean_attempts ? str(*ps.mean_attempts) : "n/a") + " targeted vs " +
              (bs.mean_attempts ? str(*bs.mean_attempts) : "n/a") + " blind (" + std::to_string(bs.successes) +
              " blind successes)");
}

// ---- transformation semantics --------------------------------------------------

namespace {

MethodUnit arithmetic_method(std::mt19937_64& rng, std::size_t index) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto lit = [&] { return std::to_string(pick(9) + 1); };
  std::vector<std::string> body{"int c0 = " + lit() + ";", "int acc = x;"};
  const std::size_t pieces = 3 + static_cast<std::size_t>(pick(4));
  for (std::size_t k = 0; k < pieces; ++k) {
    std::string v = "v" + std::to_string(k);
    switch (pick(9)) {
      case 0: body.push_back("int " + v + " = " + lit() + "; acc = acc + " + v + " * y;"); break;
      case 1: body.push_back("if (false) { acc = acc + 100; }"); break;
      case 2: body.push_back("while (false) { acc--; }"); break;
      case 3: body.push_back("if (true) { acc = acc - y; }"); break;
      case 4: body.push_back("int " + v + " = 3 * " + lit() + ";"); break;
      case 5:
        body.push_back("for (int " + v + " = 0; " + v + " < " + lit() + "; " + v + "++) { acc = acc + " + v +
                       " * c0; }");
        break;
      case 6: body.push_back("for (int " + v + " = 1; " + v + " <= 6; " + v + " += 2) { acc += y; }"); break;
      case 7: body.push_back("if (y != 0) { acc = acc / y; }"); break;
      default: body.push_back("acc = acc % " + lit() + " + c0;"); break;
    }
  }
  std::string src = "int mix" + std::to_string(index) + "(int x, int y) {";
  for (const auto& s : body) src += " " + s;
  return parse_method(src + " return acc; }");
}

}  // namespace

void semantics_criterion() {
  std::mt19937_64 rng(909);
  const std::vector<std::string> names{"constant-propagation", "dead-code-elimination", "loop-unrolling"};
  std::map<std::string, std::size_t> sites;
  std::size_t total = 0, agree = 0;
  for (std::size_t i = 0; i < 60; ++i) {
    MethodUnit m = arithmetic_method(rng, i);
    for (const auto& name : names) {
      for (const auto& r : rewrites(m, name)) {
        ++sites[name];
        ++total;
        bool same = true;
        for (std::uint64_t seed = 0; seed < 50 && same; ++seed) {
          auto args = random_arguments(m.header, seed);
          Outcome before = interpret(m, args);
          same = !before.step_limit && before == interpret(r.method, args);
        }
        if (same) ++agree;
      }
    }
  }
  bool covered = std::all_of(names.begin(), names.end(), [&](const auto& n) { return sites[n] > 0; });
  verdict(9, covered && agree == total,
          std::to_string(agree) + "/" + std::to_string(total) + " rewrite sites agree on 50 inputs (" +
              std::to_string(sites[names[0]]) + " propagation, " + std::to_string(sites[names[1]]) +
              " dead code, " + std::to_string(sites[names[2]]) + " unrolling)");
}

// ---- augmentation ---------------------------------------------------------------

void augment_criterion() {
  std::mt19937_64 rng(1010);
  std::vector<Seed> seeds;
  for (std::size_t i = 0; i < 6; ++i) {
    MethodUnit m = oracle::random_method(rng, 5);
    auto oracle_h = make_monotone_mock(oracle::random_fragment_mock(rng, m, kL));
    auto found = find_seeds(m, *oracle_h, kL, {}, nullptr, "origin" + std::to_string(i));
    seeds.push_back(found.front());
  }
  std::vector<Host> hosts;
  for (std::size_t i = 0; i < 5; ++i)
    hosts.push_back({"host" + std::to_string(i), oracle::random_method(rng, 1 + i),
                     Label{"label", std::to_string(i % 3)}});
  AugmentOptions opts;
  opts.per_pair = 2;
  opts.rng_seed = 3;
  auto samples = generate(seeds, hosts, opts);
  std::size_t expected = 0;
  for (const auto& s : seeds) {
    if (s.method_view.body.empty()) continue;
    for (const auto& h : hosts) expected += std::min<std::size_t>(opts.per_pair, h.method.body.size() + 1);
  }
  std::size_t valid = 0;
  for (const auto& a : samples) {
    auto seed = std::find_if(seeds.begin(), seeds.end(), [&](const Seed& s) { return s.origin == a.origin; });
    auto host = std::find_if(hosts.begin(), hosts.end(), [&](const Host& h) { return h.id == a.host; });
    if (seed == seeds.end() || host == hosts.end()) continue;
    const auto& inner = seed->method_view.body;
    bool parses = parse_method(pretty(a.method)) == a.method;
    bool verbatim = a.position + inner.size() <= a.method.body.size() &&
                    std::equal(inner.begin(), inner.end(), a.method.body.begin() + static_cast<long>(a.position));
    if (parses && verbatim && a.label == host->label) ++valid;
  }
  verdict(10, samples.size() == expected && valid == samples.size() && expected > 0,
          std::to_string(samples.size()) + " samples for " + std::to_string(expected) + " expected; " +
              std::to_string(valid) + " parse, hold their seed verbatim and carry the host label");
}

// ---- reproducibility ------------------------------------------------------------

namespace {

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = body.str();
  }
  return out;
}

}  // namespace

void determinism_criterion() {
  fs::path root = fs::temp_directory_path() / ("patic-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string data = PATIC_DATA_DIR;
  std::vector<std::map<std::string, std::string>> runs;
  bool launched = true;
  for (int jobs : {1, 3}) {
    fs::path out = root / ("run" + std::to_string(jobs));
    std::string cmd = std::string("'") + PATIC_CLI + "' --oracle 'mock:" + data + "/demo/mock.json' --rng 5 --jobs " +
                      std::to_string(jobs) + " run --corpus '" + data + "/demo/corpus.jsonl' --out-dir '" +
                      out.string() + "' > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) launched = false;
    runs.push_back(launched ? snapshot(out) : std::map<std::string, std::string>{});
  }
  fs::remove_all(root);
  bool ok = launched && !runs[0].empty() && runs[0] == runs[1];
  verdict(11, ok,
          std::string(launched ? "" : "a run failed; ") + std::to_string(runs[0].size()) +
              " artifacts, directories " + (runs[0] == runs[1] ? "byte-identical" : "differ"));
}
