#include <gtest/gtest.h>

#include "patic/ast.hpp"
#include "patic/errors.hpp"

using namespace patic;

namespace {

const char* kFigure = R"(public static boolean contains(String[] items, String target) {
    int i = 0;
    while (i < items.length) {
        if (items[i].equals(target)) {
            return true;
        }
        i++;
    }
    return false;
})";

}  // namespace

TEST(Ast, ParsePrintRoundTrip) {
  MethodUnit m = parse_method(kFigure);
  std::string text = pretty(m);
  EXPECT_EQ(parse_method(text), m);
  EXPECT_EQ(pretty(parse_method(text)), text);
  EXPECT_EQ(m.header.name, "contains");
  ASSERT_EQ(m.header.params.size(), 2u);
  EXPECT_EQ(m.header.params[0].type, "String[]");
}

TEST(Ast, ParsesCommonForms) {
  const char* src = R"(void f(java.util.List<Map<String, Integer>> xs) throws IOException {
    for (int i = 0; i < n; i++, n--) { x += i; }
    try { g(); } catch (Exception e) { h(e); } finally { k(); }
    int[] a = new int[4];
    Object o = new Object();
    if (a[0] > 1) { ; } else if (b) { return; } else { throw new RuntimeException("x"); }
    y = -(a + b) * c;
    z = - -x;
    s = "a\"b" + 'c' + 1.5f + 10L + 0x1F;
})";
  MethodUnit m = parse_method(src);
  std::string text = pretty(m);
  EXPECT_EQ(parse_method(text), m) << text;
  EXPECT_NE(text.find("- -x"), std::string::npos);
  EXPECT_NE(text.find("-(a + b) * c"), std::string::npos);
}

TEST(Ast, RejectsOutsideSubset) {
  EXPECT_THROW(parse_method("void f() { for (int x : xs) { } }"), SyntaxError);
  EXPECT_THROW(parse_method("void f() { { x(); } }"), SyntaxError);
  EXPECT_THROW(parse_method("void f(int a, int a) { }"), SyntaxError);
  EXPECT_THROW(parse_method("void f() { x( }"), SyntaxError);
  EXPECT_THROW(parse_method("void f() { \"abc }"), SyntaxError);
}

TEST(Ast, UniverseCounts) {
  EXPECT_EQ(statement_universe(parse_method("void f() { x(); }")).size(), 1u);
  EXPECT_EQ(statement_universe(parse_method("void f() { if (c) { x(); y(); } }")).size(), 3u);
  EXPECT_EQ(statement_universe(parse_method("void f() { try { x(); } catch (E e) { y(); } }")).size(), 3u);
}

TEST(Ast, RestrictIdentityAndEmpty) {
  MethodUnit m = parse_method(kFigure);
  EXPECT_EQ(restrict(m, statement_universe(m)), m);
  MethodUnit empty = restrict(m, {});
  EXPECT_TRUE(empty.body.empty());
  EXPECT_EQ(empty.header, m.header);
}

TEST(Ast, RestrictSplicesDroppedPredicate) {
  MethodUnit m = parse_method("void f() { if (c) { x(); y(); } z(); }");
  StatementSet keep = {{{0, 0}, {0, 1}}, {{0, 1}}};
  MethodUnit r = restrict(m, keep);
  EXPECT_EQ(pretty(r), "void f() {\n    y();\n    z();\n}\n");
  StatementSet shell_only = {{{0, 0}}};
  EXPECT_EQ(pretty(restrict(m, shell_only)), "void f() {\n    if (c) {\n    }\n}\n");
  EXPECT_THROW(restrict(m, {{{0, 7}}}), PathError);
}

TEST(Ast, TreeRoundTrip) {
  MethodUnit m = parse_method(kFigure);
  AstNode t = to_tree(m);
  EXPECT_EQ(method_from_tree(t), m);
  for (const auto& p : statement_universe(m)) {
    const AstNode* n = &t;
    for (auto i : tree_path(m, p)) n = &n->children.at(i);
    EXPECT_EQ(*n, to_tree(statement_at(m, p))) << to_string(p);
  }
}

TEST(Ast, TryTreePaths) {
  MethodUnit m = parse_method("void f() { try { a(); } catch (E e) { b(); } finally { c(); } }");
  AstNode t = to_tree(m);
  for (const auto& p : statement_universe(m)) {
    const AstNode* n = &t;
    for (auto i : tree_path(m, p)) n = &n->children.at(i);
    EXPECT_EQ(*n, to_tree(statement_at(m, p))) << to_string(p);
  }
}

TEST(Ast, OperatorLabelsLead) {
  AstNode plus = to_tree(parse_expression("a + b"));
  ASSERT_EQ(plus.children.size(), 3u);
  EXPECT_EQ(plus.children[0].label, "Op:+");
  AstNode idx = to_tree(parse_expression("a[b]"));
  EXPECT_EQ(idx.label, "Index");
  EXPECT_EQ(idx.children.size(), 2u);
}

TEST(Ast, FromTreeRejectsBadArity) {
  AstNode bad{"Binary", {{"Op:+", {}}, {"Name:a", {}}}};
  EXPECT_THROW(expr_from_tree(bad), ArityError);
  EXPECT_THROW(expr_from_tree(AstNode{"Name:int", {}}), ArityError);
  EXPECT_THROW(expr_from_tree(AstNode{"Lit:int:abc", {}}), ArityError);
}
