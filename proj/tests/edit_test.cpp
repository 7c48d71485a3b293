#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "patic/edit.hpp"
#include "patic/errors.hpp"
#include "support/oracles.hpp"

using namespace patic;

namespace {

AstNode expr_tree(const char* src) { return to_tree(parse_expression(src)); }

std::mt19937_64 rng_for(int seed) { return std::mt19937_64(static_cast<std::uint64_t>(seed)); }

}  // namespace

TEST(Edit, RenameSwapDelete) {
  AstNode sum = expr_tree("a + b");
  EXPECT_EQ(patic::apply(EditOp::rename({1}, "Name:b"), sum), expr_tree("b + b"));
  EXPECT_EQ(patic::apply(EditOp::swap({}, 1), sum), expr_tree("b + a"));
  MethodUnit m = parse_method("void f() { x(); return; z(); }");
  MethodUnit shorter = patic::apply(EditOp::remove({1, 1}), m);
  EXPECT_EQ(shorter.body.size(), 2u);
  EXPECT_EQ(pretty(shorter), "void f() {\n    x();\n    z();\n}\n");
}

TEST(Edit, ApplyErrors) {
  AstNode sum = expr_tree("a + b");
  EXPECT_THROW(patic::apply(EditOp::rename({7}, "x"), sum), PathError);
  EXPECT_THROW(patic::apply(EditOp::swap({}, 2), sum), PathError);
  MethodUnit m = parse_method("void f() { x = a + b; }");
  EXPECT_THROW(patic::apply(EditOp::remove({1, 0, 0, 0}), m), ArityError);
}

TEST(Edit, InsertAdoptsChildren) {
  AstNode t = oracle::tree("r(x y z)");
  EXPECT_EQ(oracle::show({patic::apply(EditOp::insert({}, 0, "n", 2), t)}), "r(n(x y) z)");
  EXPECT_EQ(oracle::show({patic::apply(EditOp::insert({}, 3, "n"), t)}), "r(x y z n)");
}

TEST(Edit, ScriptJsonRoundTrip) {
  EditScript s{EditOp::rename({1, 0}, "Name:q"), EditOp::insert({1}, 0, "Op:+", 1), EditOp::remove({2}),
               EditOp::swap({}, 0)};
  EXPECT_EQ(edit_script_from_json(to_json(s)), s);
  EXPECT_EQ(to_json(s)[0]["op"], "rename");
  EXPECT_THROW(edit_op_from_json(nlohmann::json{{"op", "jump"}, {"path", {1}}}), DataError);
}

TEST(Edit, ReplayKeepsEveryStep) {
  MethodUnit m = parse_method("void f() { x = a + b; }");
  EditScript s{EditOp::rename({1, 0, 0, 2, 0}, "Index"), EditOp::remove({1, 0, 0, 2, 0, 0})};
  EXPECT_THROW(replay(m, s), ArityError);
  EditScript ok{EditOp::rename({1, 0, 0, 1}, "Name:y")};
  auto t = replay(m, ok);
  ASSERT_EQ(t.steps.size(), 2u);
  EXPECT_EQ(pretty(t.steps[1]), "void f() {\n    y = a + b;\n}\n");
}

TEST(Distance, Anchors) {
  EXPECT_EQ(tree_edit_distance(expr_tree("a + b"), expr_tree("a + b")), 0u);
  EXPECT_EQ(tree_edit_distance(expr_tree("a + b"), expr_tree("a[b]")), 2u);
  EXPECT_EQ(tree_edit_distance(expr_tree("a * b"), expr_tree("b * a")), 1u);
  EXPECT_EQ(forest_distance_dp({expr_tree("a + b")}, {expr_tree("a[b]")}), 2u);
}

TEST(Distance, SwapInclusion) {
  auto rng = rng_for(7);
  for (int i = 0; i < 200; ++i) {
    auto [a, b] = oracle::random_pair(rng, 12, 6);
    auto with = forest_distance_dp({a}, {b}, true);
    auto without = forest_distance_dp({a}, {b}, false);
    EXPECT_LE(with, without);
  }
}

TEST(Distance, MatchesBreadthFirstOracle) {
  auto rng = rng_for(11);
  for (int i = 0; i < 150; ++i) {
    auto [a, b] = oracle::random_pair(rng, 8, 4);
    auto expected = oracle::bfs_distance({a}, {b}, 4);
    ASSERT_TRUE(expected.has_value());
    EXPECT_EQ(tree_edit_distance(a, b), *expected) << oracle::show({a}) << " -> " << oracle::show({b});
  }
}

TEST(Distance, MetricProperties) {
  auto rng = rng_for(3);
  for (int i = 0; i < 200; ++i) {
    auto [a, b] = oracle::random_pair(rng, 7, 3);
    auto c = oracle::perturb(rng, b, 7, 3);
    if (!c) continue;
    auto ab = tree_edit_distance(a, b);
    EXPECT_EQ(ab, tree_edit_distance(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(tree_edit_distance(a, *c), ab + tree_edit_distance(b, *c));
  }
}

TEST(Enumerate, IdentifierCandidates) {
  Vocabulary vocab{{"data"}};
  auto ids = identifier_candidates(parse_method("void f() { bmp = file; }"), vocab);
  EXPECT_EQ(ids, (std::vector<std::string>{"bmp", "file", "data"}));
  auto filtered = identifier_candidates(parse_method("void f() { x(); }"), Vocabulary{{"while", "item"}});
  EXPECT_EQ(filtered, (std::vector<std::string>{"x", "item"}));
  auto types = type_candidates(parse_method("void save(Bitmap bmp) { bos.close(); }"), Vocabulary::builtin());
  EXPECT_NE(std::find(types.begin(), types.end(), "Image"), types.end());
}

TEST(Enumerate, StructuralEditNeedsTwoSteps) {
  MethodUnit m = parse_method("void f() { x = a + b; }");
  EnumerationOptions opts;
  opts.vocabulary.words.clear();
  auto out = enumerate_minimal_valid_edits(m, {}, opts);
  bool found = false;
  for (const auto& c : out) {
    if (pretty(c.method) == "void f() {\n    x = a[b];\n}\n") {
      found = true;
      EXPECT_EQ(c.script.size(), 2u);
    }
    if (c.script.size() == 1) EXPECT_EQ(c.script[0].kind, EditOp::Kind::Rename);
  }
  EXPECT_TRUE(found);
}

TEST(Enumerate, ResultsReplayAndReparse) {
  MethodUnit m = parse_method("int f(int n) { int s = 0; if (s < n) { s += 2; } return s * 1; }");
  for (const auto& c : enumerate_minimal_valid_edits(m, {})) {
    EXPECT_EQ(parse_method(pretty(c.method)), c.method);
    EXPECT_EQ(patic::apply(c.script, m), c.method);
    EXPECT_NE(c.method, m);
  }
}

TEST(Enumerate, LiteralRenamesKeepKind) {
  MethodUnit m = parse_method("void f() { g(1, \"a b\", 'c', true, 2.5); }");
  for (const auto& c : enumerate_minimal_valid_edits(m, {})) {
    const auto& op = c.script.front();
    if (label_kind(op.label) != "Lit") continue;
    AstNode orig = to_tree(m);
    const AstNode* n = &orig;
    for (auto i : op.path) n = &n->children[i];
    std::string old_kind = label_value(n->label).substr(0, label_value(n->label).find(':'));
    std::string new_kind = label_value(op.label).substr(0, label_value(op.label).find(':'));
    EXPECT_EQ(old_kind, new_kind);
  }
}

TEST(Enumerate, FrozenStatementsUntouched) {
  MethodUnit m = parse_method("void f() { a(); b(); }");
  StatementSet frozen{{{0, 0}}};
  auto out = enumerate_minimal_valid_edits(m, frozen);
  ASSERT_FALSE(out.empty());
  for (const auto& c : out) EXPECT_EQ(c.method.body[0], m.body[0]);
}

TEST(Enumerate, MatchesExhaustiveSingleRenames) {
  MethodUnit m = parse_method("void f(int p) { a = b + p; c(a); }");
  Vocabulary vocab{{"x", "y", "z"}};
  EnumerationOptions opts;
  opts.vocabulary = vocab;
  std::set<std::string> produced;
  for (const auto& c : enumerate_minimal_valid_edits(m, {}, opts))
    if (c.script.size() == 1) produced.insert(pretty(c.method));

  // Generate every single relabeling from a broad pool, validate, filter.
  std::vector<std::string> pool;
  for (const auto& id : identifier_candidates(m, vocab)) pool.push_back("Name:" + id);
  for (const auto& t : type_candidates(m, vocab)) pool.push_back("Type:" + t);
  for (const char* op : {"+", "-", "*", "/", "%", "==", "!=", "<", ">", "<=", ">=", "&&", "||", "&", "|", "^", "<<",
                         ">>", ">>>", "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=", "!",
                         "~", "++", "--"})
    pool.push_back(std::string("Op:") + op);
  for (const char* s : {"Call", "Index", "Binary", "Field", "Unary", "Postfix", "Assign", "New", "NewArray", "ExprStmt",
                        "Return", "Throw", "If", "While", "For", "Try", "Block", "LocalVar", "Break", "Empty",
                        "Name:int"})
    pool.push_back(s);
  std::set<std::string> expected;
  AstNode root = to_tree(m);
  for (const auto& tp : editable_nodes(m, {})) {
    for (const auto& label : pool) {
      try {
        MethodUnit r = method_from_tree(patic::apply(EditOp::rename(tp, label), root));
        std::string src = pretty(r);
        if (r != m && parse_method(src) == r) expected.insert(src);
      } catch (const Error&) {
      }
    }
  }
  EXPECT_EQ(produced, expected);
  EXPECT_GT(expected.size(), 10u);
}
