#pragma once

// Java-subset method model: parsing, canonical printing, statement addressing
// and the uniform labeled-tree view used by the edit engine.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace patic {

enum class LiteralKind { Int, Long, Float, Double, Bool, Char, String, Null };

std::string_view literal_kind_name(LiteralKind kind);

struct Expr {
  enum class Kind { Name, Literal, Field, Call, Index, Binary, Unary, Postfix, Assign, New, NewArray };

  // Payload by kind:
  //   Name: text = identifier            Literal: text = lexeme, literal = kind
  //   Field: text = member, {base}       Call: {callee, args...}
  //   Index: {base, index}               Binary/Assign: text = op, {lhs, rhs}
  //   Unary/Postfix: text = op, {x}      New: text = type, {args...}
  //   NewArray: text = element type, {dimension}
  Kind kind = Kind::Name;
  std::string text;
  LiteralKind literal = LiteralKind::Int;
  std::vector<Expr> children;

  friend bool operator==(const Expr&, const Expr&) = default;

  static Expr name(std::string id);
  static Expr lit(LiteralKind kind, std::string lexeme);
  static Expr field(Expr base, std::string member);
  static Expr call(Expr callee, std::vector<Expr> args);
  static Expr index(Expr base, Expr idx);
  static Expr binary(std::string op, Expr lhs, Expr rhs);
  static Expr unary(std::string op, Expr operand);
  static Expr postfix(std::string op, Expr operand);
  static Expr assign(std::string op, Expr target, Expr value);
};

struct Stmt;

struct CatchClause {
  std::string type;
  std::string name;
  std::vector<Stmt> body;

  friend bool operator==(const CatchClause&, const CatchClause&);
};

struct Stmt {
  enum class Kind { LocalVar, ExprStmt, Return, If, While, For, Try, Empty, Break, Continue, Throw };

  Kind kind = Kind::Empty;
  std::string type;           // LocalVar
  std::string name;           // LocalVar
  std::optional<Expr> expr;   // initializer, expression, condition, returned or thrown value
  std::vector<Stmt> init;     // For: at most one LocalVar or ExprStmt
  std::vector<Expr> update;   // For
  std::vector<Stmt> body;     // then-block, loop body or try-block
  bool has_else = false;
  std::vector<Stmt> else_body;
  std::vector<CatchClause> catches;
  bool has_finally = false;
  std::vector<Stmt> finally_body;

  friend bool operator==(const Stmt&, const Stmt&) = default;

  static Stmt local(std::string type, std::string name, std::optional<Expr> init = std::nullopt);
  static Stmt expression(Expr e);
  static Stmt ret(std::optional<Expr> value = std::nullopt);
  static Stmt empty();
};

inline bool operator==(const CatchClause& a, const CatchClause& b) {
  return a.type == b.type && a.name == b.name && a.body == b.body;
}

bool is_control(Stmt::Kind kind);
inline bool is_control(const Stmt& s) { return is_control(s.kind); }

// Nested statement lists of a control statement. If: then, else. While/For: body.
// Try: try-block, one per catch clause, finally.
std::size_t block_count(const Stmt& s);
const std::vector<Stmt>& block(const Stmt& s, std::size_t i);
std::vector<Stmt>& block(Stmt& s, std::size_t i);

// The statement with every nested block emptied: what a control statement
// contributes on its own to a statement set.
Stmt shell(const Stmt& s);

struct Param {
  std::string type;
  std::string name;
  friend bool operator==(const Param&, const Param&) = default;
};

struct MethodHeader {
  std::vector<std::string> modifiers;
  std::string result_type;
  std::string name;
  std::vector<Param> params;
  std::vector<std::string> throws;
  friend bool operator==(const MethodHeader&, const MethodHeader&) = default;
};

struct MethodUnit {
  MethodHeader header;
  std::vector<Stmt> body;
  friend bool operator==(const MethodUnit&, const MethodUnit&) = default;
};

struct PathStep {
  std::uint32_t block = 0;
  std::uint32_t index = 0;
  friend auto operator<=>(const PathStep&, const PathStep&) = default;
};

using StatementPath = std::vector<PathStep>;
using StatementSet = std::set<StatementPath>;

std::string to_string(const StatementPath& path);
// Inverse of to_string: "2/1:0" is statement 0 of block 1 of top-level statement 2.
StatementPath parse_path(std::string_view text);

// ---- parsing and printing ---------------------------------------------------

MethodUnit parse_method(std::string_view source);
Expr parse_expression(std::string_view source);

std::string pretty(const MethodUnit& m);
std::string pretty(const Stmt& s, int indent = 0);
std::string pretty(const Expr& e);

struct Token {
  enum class Kind { Ident, Keyword, Literal, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  LiteralKind literal = LiteralKind::Int;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view source);
std::vector<std::string> token_texts(std::string_view source);

bool is_reserved_word(std::string_view word);

// Lexer tokens of the pretty-printed body (braces of the method excluded).
std::size_t body_token_count(const MethodUnit& m);

// ---- statement addressing ---------------------------------------------------

StatementSet statement_universe(const MethodUnit& m);
const Stmt& statement_at(const MethodUnit& m, const StatementPath& path);
Stmt& statement_at(MethodUnit& m, const StatementPath& path);
bool contains_path(const MethodUnit& m, const StatementPath& path);
MethodUnit restrict(const MethodUnit& m, const StatementSet& keep);

// ---- labeled tree view ------------------------------------------------------

struct AstNode {
  std::string label;
  std::vector<AstNode> children;

  std::size_t size() const;
  friend bool operator==(const AstNode&, const AstNode&) = default;
};

using TreePath = std::vector<std::uint32_t>;

AstNode to_tree(const MethodUnit& m);
AstNode to_tree(const Stmt& s);
AstNode to_tree(const Expr& e);
AstNode to_tree(const MethodHeader& h);

// Inverse conversions; throw ArityError on trees that do not describe a valid node.
MethodUnit method_from_tree(const AstNode& n);
Stmt stmt_from_tree(const AstNode& n);
Expr expr_from_tree(const AstNode& n);

// Location of a statement's node inside to_tree(m).
TreePath tree_path(const MethodUnit& m, const StatementPath& path);

std::string label_kind(std::string_view label);
std::string label_value(std::string_view label);

}  // namespace patic
