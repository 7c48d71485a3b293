#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "patic/errors.hpp"
#include "patic/mutants.hpp"

using namespace patic;

namespace {

const Label kL{"save", "bitmap", "to", "file"};

MethodUnit fixture() {
  std::ifstream in(std::string(PATIC_DATA_DIR) + "/fixtures/save_bitmap.java");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_method(ss.str());
}

StatementPath path(const char* s) { return parse_path(s); }

MethodUnit with_failed_log(MethodUnit m) {
  auto& stmt = statement_at(m, path("1/0:5"));
  stmt = parse_method("void g() { Log.d(TAG, \"save to file failed\"); }").body[0];
  return m;
}

MockModelSpec succeeded_or_failed() {
  MockModelSpec spec;
  spec.default_label = {"other"};
  spec.rules.push_back({fixture(), {path("1/0:5")}, std::nullopt, 0, kL});
  spec.rules.push_back({with_failed_log(fixture()), {path("1/0:5")}, std::nullopt, 0, kL});
  return spec;
}

Seed seed_of(const MethodUnit& m, StatementSet keep) {
  Seed s;
  s.keep = keep;
  s.method_view = restrict(m, keep);
  s.label = kL;
  return s;
}

std::set<std::string> sources(const std::vector<Mutant>& ms) {
  std::set<std::string> out;
  for (const auto& m : ms) out.insert(pretty(m.in_context));
  return out;
}

// Round-one reference: every single edit of the seed view, embedded and tested.
std::set<std::string> depth_one(const MethodUnit& m, const Seed& seed, OracleHandle& oracle,
                                const EnumerationOptions& opts) {
  std::set<std::string> out;
  for (const auto& c : enumerate_minimal_valid_edits(seed.method_view, {}, opts)) {
    bool deletes = false;
    for (const auto& op : c.script) deletes |= op.kind == EditOp::Kind::Delete;
    if (deletes) continue;
    auto ctx = embed(m, seed.keep, c.method);
    if (ctx && oracle.top1_equals(*ctx, kL)) out.insert(pretty(*ctx));
  }
  return out;
}

}  // namespace

TEST(Embed, PutsVariantBack) {
  MethodUnit m = parse_method("void f() { a(); if (c) { b(); d(); } e(); }");
  StatementSet keep{path("1"), path("1/0:1")};
  MethodUnit view = restrict(m, keep);
  EXPECT_EQ(pretty(view), "void f() {\n    if (c) {\n        d();\n    }\n}\n");
  MethodUnit edited = parse_method("void f() { while (k) { z(); } }");
  auto out = embed(m, keep, edited);
  ASSERT_TRUE(out);
  EXPECT_EQ(*out, parse_method("void f() { a(); while (k) { b(); z(); } e(); }"));
  EXPECT_FALSE(embed(m, keep, parse_method("void f() { z(); }")));
  EXPECT_EQ(*embed(m, keep, view), m);
}

TEST(Mutants, SucceededToFailed) {
  MethodUnit m = fixture();
  auto oracle = make_monotone_mock(succeeded_or_failed());
  ASSERT_TRUE(oracle->top1_equals(m, kL));
  auto seeds = find_seeds(m, *oracle, kL);
  ASSERT_EQ(seeds.size(), 1u);
  EXPECT_EQ(seeds[0].keep, (StatementSet{path("1/0:5")}));

  MutantSearchOptions opts;
  opts.enumeration.string_words = {"write"};
  MutantSearchStats stats;
  auto mutants = find_mutants(m, *oracle, kL, seeds, opts, &stats);
  ASSERT_EQ(mutants.size(), 1u);
  EXPECT_EQ(mutants[0].in_context, with_failed_log(m));
  ASSERT_EQ(mutants[0].script.size(), 1u);
  EXPECT_EQ(mutants[0].script[0].label, "Lit:string:\"save to file failed\"");
  EXPECT_EQ(mutants[0].strength, Strength::Strongest);
  bool write_tried = false;
  for (const auto& d : stats.discarded_sources) write_tried |= d.find("\"write to file succeeded\"") != std::string::npos;
  EXPECT_TRUE(write_tried);
  auto reference = make_monotone_mock(succeeded_or_failed());
  EnumerationOptions pool = opts.enumeration;
  for (auto& w : string_literal_words(m)) pool.string_words.push_back(w);
  EXPECT_EQ(sources(mutants), depth_one(m, seeds[0], *reference, pool));
}

TEST(Mutants, ExactSeedMockHasNone) {
  MethodUnit m = fixture();
  MockModelSpec spec;
  spec.anchor = m;
  spec.default_label = {"other"};
  spec.rules.push_back({std::nullopt, {path("1/0:4"), path("1/0:5")}, std::nullopt, 0, kL});
  auto oracle = make_monotone_mock(spec);
  MutantSearchStats stats;
  auto mutants = find_mutants(m, *oracle, kL, find_seeds(m, *oracle, kL), {}, &stats);
  EXPECT_TRUE(mutants.empty());
  EXPECT_EQ(stats.rounds, 1u);
  EXPECT_GT(stats.discarded, 0u);
}

TEST(Mutants, StrengthClasses) {
  // Label kept by the exact statement alone, or by any statement within two
  // edits of it next to g(a).
  const AstNode target = to_tree(parse_method("void f(int a) { x = a + 1; }").body[0]);
  auto oracle = make_function_oracle([&](const MethodUnit& m) {
    bool exact = false, near = false, helper = false;
    for (const auto& s : m.body) {
      auto t = to_tree(s);
      exact |= t == target;
      near |= tree_edit_distance(t, target) <= 2;
      helper |= pretty(s) == "g(a);\n";
    }
    return Prediction{{{exact || (near && helper) ? kL : Label{"other"}, 1.0}}};
  });
  MethodUnit m = parse_method("void f(int a) { x = a + 1; g(a); }");
  auto seeds = find_seeds(m, *oracle, kL);
  ASSERT_EQ(seeds.size(), 1u);
  MutantSearchOptions opts;
  opts.enumeration.vocabulary.words = {"b"};
  opts.enumeration.rename_operators = false;
  opts.enumeration.structural = false;
  auto mutants = find_mutants(m, *oracle, kL, seeds, opts);
  std::map<std::string, Strength> by_variant;
  for (const auto& mu : mutants) by_variant[pretty(mu.variant)] = mu.strength;
  auto body = [](const char* s) { return std::string("void f(int a) {\n    ") + s + "\n}\n"; };
  ASSERT_TRUE(by_variant.count(body("x = b + 1;")));
  EXPECT_EQ(by_variant[body("x = b + 1;")], Strength::Ordinary);
  ASSERT_TRUE(by_variant.count(body("x = b + 2;")));
  EXPECT_EQ(by_variant[body("x = b + 2;")], Strength::Weakest);
  for (const auto& mu : mutants) EXPECT_LE(mu.script.size(), 2u);
}

TEST(Mutants, ScriptsAreModificationOnly) {
  MethodUnit m = parse_method("void f(int a) { x = a + 1; g(a); }");
  MockModelSpec spec;
  spec.anchor = m;
  spec.default_label = {"other"};
  spec.rules.push_back({std::nullopt, {path("0")}, std::nullopt, 2, kL});
  auto oracle = make_monotone_mock(spec);
  MutantSearchOptions opts;
  opts.enumeration.vocabulary.words = {"b"};
  auto mutants = find_mutants(m, *oracle, kL, find_seeds(m, *oracle, kL), opts);
  ASSERT_FALSE(mutants.empty());
  for (const auto& mu : mutants) {
    for (const auto& op : mu.script) EXPECT_NE(op.kind, EditOp::Kind::Delete);
    EXPECT_EQ(patic::apply(mu.script, restrict(m, mu.keep)), mu.variant);
    EXPECT_TRUE(oracle->top1_equals(mu.in_context, kL));
    EXPECT_EQ(statement_universe(mu.in_context).size(), statement_universe(m).size());
  }
}

TEST(Mutants, DiscardedVariantsAreNeverExtended) {
  MethodUnit m = parse_method("void f(int a) { x = a + 1; g(a); }");
  MockModelSpec spec;
  spec.anchor = m;
  spec.default_label = {"other"};
  spec.rules.push_back({std::nullopt, {path("0")}, std::nullopt, 1, kL});
  auto oracle = make_monotone_mock(spec);
  MutantSearchOptions opts;
  opts.enumeration.vocabulary.words = {"b"};
  MutantSearchStats stats;
  auto seeds = find_seeds(m, *oracle, kL);
  oracle->clear_log();
  auto mutants = find_mutants(m, *oracle, kL, seeds, opts, &stats);
  auto log = oracle->query_log();
  std::set<std::string> valid = sources(mutants);
  valid.insert(pretty(m));
  StatementSet frozen = statement_universe(m);
  for (const auto& p : seeds[0].keep) frozen.erase(p);
  // Descendants move further from the seed than the discarded variant.
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log[i].top1 == kL) continue;
    MethodUnit failed = parse_method(log[i].source);
    std::size_t away = method_distance(m, failed);
    for (const auto& c : enumerate_minimal_valid_edits(failed, frozen, opts.enumeration)) {
      std::string src = pretty(c.method);
      if (valid.count(src) || method_distance(m, c.method) <= away) continue;
      for (std::size_t j = i + 1; j < log.size(); ++j) EXPECT_NE(log[j].source, src);
    }
  }
  EXPECT_GT(stats.discarded, 0u);
}

TEST(Mutants, MatchesExhaustiveSearchWithinTolerance) {
  MethodUnit m = parse_method("void f(int a) { x = a + 1; g(a); }");
  MockModelSpec spec;
  spec.anchor = m;
  spec.default_label = {"other"};
  spec.rules.push_back({std::nullopt, {path("0")}, std::nullopt, 2, kL});
  auto oracle = make_monotone_mock(spec);
  auto reference = make_monotone_mock(spec);
  MutantSearchOptions opts;
  opts.enumeration.vocabulary.words = {"b"};
  auto seeds = find_seeds(m, *oracle, kL);
  auto mutants = find_mutants(m, *oracle, kL, seeds, opts);
  // Breadth-first over all variants to depth tolerance + 1, testing every one.
  std::set<std::string> valid, seen{pretty(seeds[0].method_view)};
  std::vector<MethodUnit> layer{seeds[0].method_view};
  for (int depth = 0; depth < 3; ++depth) {
    std::vector<MethodUnit> next;
    for (const auto& v : layer)
      for (auto& c : enumerate_minimal_valid_edits(v, {}, opts.enumeration)) {
        bool deletes = false;
        for (const auto& op : c.script) deletes |= op.kind == EditOp::Kind::Delete;
        if (deletes || !seen.insert(pretty(c.method)).second) continue;
        auto ctx = embed(m, seeds[0].keep, c.method);
        if (ctx && reference->top1_equals(*ctx, kL)) valid.insert(pretty(*ctx));
        next.push_back(std::move(c.method));
      }
    layer = std::move(next);
  }
  EXPECT_EQ(sources(mutants), valid);
  EXPECT_GT(valid.size(), 5u);
}

TEST(Mutants, JsonRecord) {
  MethodUnit m = fixture();
  auto oracle = make_monotone_mock(succeeded_or_failed());
  auto mutants = find_mutants(m, *oracle, kL, find_seeds(m, *oracle, kL));
  ASSERT_FALSE(mutants.empty());
  auto j = to_json(mutants[0]);
  EXPECT_EQ(j["strength"], "strongest");
  EXPECT_EQ(edit_script_from_json(j["script"]), mutants[0].script);
}
