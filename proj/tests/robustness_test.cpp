#include <gtest/gtest.h>

#include "patic/edit.hpp"
#include "patic/errors.hpp"
#include "patic/robustness.hpp"

using namespace patic;

namespace {

StatementPath top(std::uint32_t i) { return {{0, i}}; }

std::string body_of(const MethodUnit& m) {
  std::string out;
  for (const auto& s : m.body) out += pretty(s);
  return out;
}

// Every rewrite of `name` agrees with the original on generated inputs.
void expect_equivalent(const MethodUnit& m, const std::string& name) {
  auto all = rewrites(m, name);
  ASSERT_FALSE(all.empty()) << name << " has no site in\n" << pretty(m);
  for (const auto& r : all) {
    EXPECT_EQ(r.distance, method_distance(m, r.method));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto args = random_arguments(m.header, seed);
      Outcome before = interpret(m, args), after = interpret(r.method, args);
      ASSERT_FALSE(before.step_limit);
      ASSERT_EQ(before, after) << name << " changed behaviour:\n" << pretty(m) << "\n=>\n" << pretty(r.method);
    }
  }
}

std::unique_ptr<OracleHandle> fragment_mock(const char* anchor, StatementSet fragment, Label label) {
  MockModelSpec spec;
  spec.anchor = parse_method(anchor);
  spec.default_label = {"other"};
  spec.rules.push_back({std::nullopt, std::move(fragment), std::nullopt, 0, std::move(label)});
  return make_monotone_mock(spec);
}

}  // namespace

TEST(Transform, OperandsSwapCostsOneEdit) {
  auto m = parse_method("long total(long childHits, long duration) { return childHits + duration; }");
  auto r = apply_transformation(m, "operands-swapping");
  EXPECT_EQ(body_of(r.method), "return duration + childHits;\n");
  EXPECT_EQ(r.distance, 1u);
}

TEST(Transform, OperandsSwapSkipsGuardedOperands) {
  auto m = parse_method("boolean f(String s) { String t = \"a\" + s; return s != null && s.isEmpty(); }");
  EXPECT_TRUE(rewrites(m, "operands-swapping").empty());
}

TEST(Transform, ApiSubstitutionUsesTable) {
  auto m = parse_method("boolean has(List Items, int target) { return Items.indexOf(target) != -1; }");
  auto r = apply_transformation(m, "api-substitution");
  EXPECT_EQ(body_of(r.method), "return Items.contains(target);\n");
  TransformOptions none;
  none.api_table.clear();
  EXPECT_TRUE(rewrites(m, "api-substitution", none).empty());
  auto loaded = load_api_substitutions(std::string(PATIC_DATA_DIR) + "/api_substitutions.json");
  EXPECT_GT(loaded.size(), builtin_api_substitutions().size());
}

TEST(Transform, ForLoopBecomesWhileLoop) {
  auto m = parse_method("int sum(int n) { int s = 0; for (int i = 0; i < n; i++) { s += i; } return s; }");
  auto r = apply_transformation(m, "control-statement-unification");
  EXPECT_EQ(body_of(r.method), "int s = 0;\nint i = 0;\nwhile (i < n) {\n    s += i;\n    i++;\n}\nreturn s;\n");
  expect_equivalent(m, "control-statement-unification");
}

TEST(Transform, ReorderingSwapsIndependentCalls) {
  auto m = parse_method("void f(A a, B b) { a.open(); b.close(); }");
  auto r = apply_transformation(m, "statements-reordering");
  EXPECT_EQ(body_of(r.method), "b.close();\na.open();\n");
  EXPECT_EQ(r.distance, 1u);
  EXPECT_EQ(r.touched, (StatementSet{top(0), top(1)}));
}

TEST(Transform, ReorderingRespectsDependences) {
  EXPECT_TRUE(rewrites(parse_method("void f() { int a = 1; int b = a; }"), "statements-reordering").empty());
  EXPECT_TRUE(rewrites(parse_method("void f(A a) { a.open(); a.close(); }"), "statements-reordering").empty());
  EXPECT_TRUE(rewrites(parse_method("void f(int x) { x = 1; log(x); }"), "statements-reordering").empty());
}

TEST(Transform, RenamingIsConsistent) {
  auto m = parse_method("int f(int n) { int bmp = n; bmp = bmp + 1; return bmp; }");
  auto all = rewrites(m, "variable-renaming");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].method.header.params[0].name, "data");
  EXPECT_TRUE(all[0].touched.count(StatementPath{}));
  const Rewrite& local = all[1];
  EXPECT_EQ(body_of(local.method), "int data = n;\ndata = data + 1;\nreturn data;\n");
  EXPECT_EQ(local.distance, 4u);
  expect_equivalent(m, "variable-renaming");
}

TEST(Transform, RestrictedRewritesOnlyTouchAllowedStatements) {
  auto m = parse_method(
      "int f(int a, int b) { int x = a + b; int y = a * b; log(x); log(y); return x + y; }");
  TransformOptions opts;
  opts.only = StatementSet{top(1)};
  for (const auto& name : targeted_transformations())
    for (const auto& r : rewrites(m, name, opts)) {
      EXPECT_TRUE(std::includes(opts.only->begin(), opts.only->end(), r.touched.begin(), r.touched.end()));
      for (std::uint32_t i : {0u, 2u, 3u, 4u}) EXPECT_EQ(r.method.body[i], m.body[i]);
    }
  EXPECT_EQ(rewrites(m, "operands-swapping", opts).size(), 1u);
}

TEST(Transform, UnknownNameAndMissingSite) {
  auto m = parse_method("void f() { g(); }");
  EXPECT_THROW(rewrites(m, "obfuscation"), DataError);
  EXPECT_THROW(apply_transformation(m, "loop-unrolling"), NotApplicable);
}

TEST(Transform, BaselineRewritesPreserveBehaviour) {
  expect_equivalent(parse_method("int f(int n) { int i = 0; boolean go = true; while (go) { i = i + 2; "
                                 "if (i > n) { go = false; } } return i; }"),
                    "control-flag-removal");
  expect_equivalent(parse_method("int f(int a, int b) { int r = 0; if (a > 0) { if (b > 0) { r = a * b; } } return r; }"),
                    "nested-condition-simplification");
  expect_equivalent(parse_method("int f(int n, int k) { int s = 0; for (int i = 0; i < n; i++) { int m = k * 2; "
                                 "s += m + i; } return s; }"),
                    "hoisting");
  expect_equivalent(parse_method("int f(int a) { int unused = 3; if (false) { a = 1; } while (false) { a--; } "
                                 "if (a > 2) { return a; a++; } return -a; }"),
                    "dead-code-elimination");
  expect_equivalent(parse_method("int f(int a) { int k = 5; return a * k + k; }"), "constant-propagation");
  expect_equivalent(parse_method("int f(int a) { int s = a; for (int i = 0; i < 4; i++) { s = s * 2 + i; } return s; }"),
                    "loop-unrolling");
  expect_equivalent(parse_method("int f(int a) { while (a > 0) { a -= 3; } return a; }"),
                    "control-statement-unification");
}

TEST(Transform, BaselineShapes) {
  auto flag = apply_transformation(parse_method("void f() { boolean go = true; while (go) { step(); if (done()) { go = false; } } }"),
                                   "control-flag-removal");
  EXPECT_EQ(body_of(flag.method), "while (true) {\n    step();\n    if (done()) {\n        break;\n    }\n}\n");
  auto unrolled = apply_transformation(parse_method("void f() { for (int i = 0; i < 3; i++) { g(i); } }"), "loop-unrolling");
  EXPECT_EQ(body_of(unrolled.method), "g(0);\ng(1);\ng(2);\n");
  auto big = parse_method("void f() { for (int i = 0; i < 9; i++) { g(i); } }");
  EXPECT_TRUE(rewrites(big, "loop-unrolling").empty());
  auto nested = apply_transformation(parse_method("void f(boolean a, boolean b) { if (a) { if (b) { g(); } } }"),
                                     "nested-condition-simplification");
  EXPECT_EQ(body_of(nested.method), "if (a && b) {\n    g();\n}\n");
}

TEST(Interpreter, ModelsArithmeticArraysAndCalls) {
  auto m = parse_method(
      "int f(int n) { int[] a = new int[3]; for (int i = 0; i < a.length; i++) { a[i] = i * n; } "
      "log(a[2]); return a[1] + a[2]; }");
  Outcome o = interpret(m, {Value{std::int64_t{5}}});
  ASSERT_TRUE(o.returned);
  EXPECT_EQ(to_string(*o.returned), "15");
  EXPECT_EQ(o.calls, std::vector<std::string>{"this.log(10)"});
  Outcome div = interpret(parse_method("int f(int x) { return 1 / x; }"), {Value{std::int64_t{0}}});
  EXPECT_EQ(div.exception, "ArithmeticException: / by zero");
  Outcome loop = interpret(parse_method("void f() { while (true) { } }"), {}, 1000);
  EXPECT_TRUE(loop.step_limit);
  Outcome caught = interpret(
      parse_method("String f(String s) { try { throw new IllegalStateException(s); } catch (Exception e) { return s + "
                   "\"!\"; } finally { done(); } }"),
      {Value{std::string("x")}});
  EXPECT_EQ(to_string(*caught.returned), "x!");
  EXPECT_EQ(caught.calls, std::vector<std::string>{"this.done()"});
  EXPECT_EQ(random_arguments(m.header, 7), random_arguments(m.header, 7));
}

TEST(Attack, RenamingFlipsFragmentMock) {
  const char* src = "void decode() { Bitmap bmp = load(); }";
  auto oracle = fragment_mock(src, {top(0)}, {"decode"});
  AttackOptions opts;
  auto r = attack(parse_method(src), *oracle, {"decode"}, {{top(0)}}, opts, "m1");
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.attempts, 1u);
  EXPECT_EQ(r.distance, 1u);
  EXPECT_EQ(body_of(*r.adversarial), "Bitmap data = load();\n");
  EXPECT_EQ(r.predicted, (Label{"other"}));
  EXPECT_EQ(r.trail, std::vector<std::string>{"variable-renaming@0"});
}

TEST(Attack, InsensitiveMockExhaustsBudget) {
  MockModelSpec spec;
  spec.default_label = {"same"};
  auto oracle = make_monotone_mock(spec);
  auto m = parse_method("int f(int a, int b) { int x = a + b; int y = a * b; int z = x * y; return x + y + z; }");
  AttackOptions opts;
  opts.budget = 3;
  StatementSet all = statement_universe(m);
  auto r = attack(m, *oracle, {"same"}, {all}, opts);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.attempts, 3u);
  EXPECT_FALSE(r.adversarial);
  EXPECT_THROW(attack(m, *oracle, {"different"}, {all}, opts), NotApplicable);
}

TEST(Attack, PaticPlanIsRankedAndSeedTargeted) {
  auto m = parse_method(
      "int f(int a, int b) { int x = a + b; int y = a * b; log(x); log(y); for (int i = 0; i < 2; i++) { g(i); } "
      "return x; }");
  std::vector<StatementSet> seeds{{top(1)}, {top(3)}};
  AttackOptions opts;
  auto plan = attack_plan(m, seeds, opts);
  ASSERT_FALSE(plan.empty());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    for (const auto& p : plan[i].touched) EXPECT_TRUE(p == top(1) || p == top(3)) << to_string(p);
    if (i) EXPECT_LE(plan[i - 1].distance, plan[i].distance);
  }
  opts.strategy = Strategy::Baseline;
  auto blind = attack_plan(m, seeds, opts);
  EXPECT_FALSE(blind.empty());
  opts.exclude = {"loop-unrolling", "control-statement-unification", "constant-propagation"};
  for (const auto& r : attack_plan(m, seeds, opts)) EXPECT_NE(r.transformation, "loop-unrolling");
  opts.exclude = {"bogus"};
  EXPECT_THROW(attack_plan(m, seeds, opts), DataError);
  // Same seed, same order.
  AttackOptions a, b;
  a.rng_seed = b.rng_seed = 11;
  a.strategy = b.strategy = Strategy::Baseline;
  auto p1 = attack_plan(m, seeds, a), p2 = attack_plan(m, seeds, b);
  ASSERT_EQ(p1.size(), p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) EXPECT_EQ(p1[i].method, p2[i].method);
}

TEST(Attack, ResultJsonRoundTrips) {
  AttackResult r;
  r.origin = "x";
  r.success = true;
  r.adversarial = parse_method("void f() { g(); }");
  r.distance = 2;
  r.attempts = 4;
  r.trail = {"hoisting@0"};
  r.predicted = {"a", "b"};
  auto back = attack_result_from_json(to_json(r));
  EXPECT_EQ(to_json(back), to_json(r));
  EXPECT_THROW(attack_result_from_json(nlohmann::json{{"origin", 1}}), DataError);
}

TEST(Score, MeansOverSuccesses) {
  AttackResult a, b, c;
  a.success = b.success = true;
  a.distance = 1;
  b.distance = 3;
  a.attempts = 2;
  b.attempts = 4;
  c.attempts = 50;
  auto r = score({a, b, c});
  EXPECT_EQ(r.methods, 3u);
  EXPECT_DOUBLE_EQ(*r.mean_distance, 2.0);
  EXPECT_DOUBLE_EQ(*r.mean_attempts, 3.0);
  EXPECT_NEAR(r.failure_percentage, 100.0 / 3.0, 1e-9);
  auto fail = score({c, c});
  EXPECT_DOUBLE_EQ(fail.failure_percentage, 100.0);
  EXPECT_FALSE(fail.mean_distance);
  EXPECT_FALSE(fail.mean_attempts);
  EXPECT_TRUE(to_json(fail)["mean_distance"].is_null());
  EXPECT_THROW(score({}), EmptyInput);
}
