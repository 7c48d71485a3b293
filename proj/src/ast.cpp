#include <functional>

#include "patic/ast.hpp"
#include "patic/errors.hpp"

namespace patic {

std::string_view literal_kind_name(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::Int: return "int";
    case LiteralKind::Long: return "long";
    case LiteralKind::Float: return "float";
    case LiteralKind::Double: return "double";
    case LiteralKind::Bool: return "bool";
    case LiteralKind::Char: return "char";
    case LiteralKind::String: return "string";
    case LiteralKind::Null: return "null";
  }
  return "int";
}

namespace {

std::optional<LiteralKind> literal_kind_from(std::string_view name) {
  for (auto k : {LiteralKind::Int, LiteralKind::Long, LiteralKind::Float, LiteralKind::Double, LiteralKind::Bool,
                 LiteralKind::Char, LiteralKind::String, LiteralKind::Null}) {
    if (literal_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

Expr Expr::name(std::string id) {
  Expr e;
  e.kind = Kind::Name;
  e.text = std::move(id);
  return e;
}

Expr Expr::lit(LiteralKind kind, std::string lexeme) {
  Expr e;
  e.kind = Kind::Literal;
  e.literal = kind;
  e.text = std::move(lexeme);
  return e;
}

Expr Expr::field(Expr base, std::string member) {
  Expr e;
  e.kind = Kind::Field;
  e.text = std::move(member);
  e.children.push_back(std::move(base));
  return e;
}

Expr Expr::call(Expr callee, std::vector<Expr> args) {
  Expr e;
  e.kind = Kind::Call;
  e.children.push_back(std::move(callee));
  for (auto& a : args) e.children.push_back(std::move(a));
  return e;
}

Expr Expr::index(Expr base, Expr idx) {
  Expr e;
  e.kind = Kind::Index;
  e.children = {std::move(base), std::move(idx)};
  return e;
}

Expr Expr::binary(std::string op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::Binary;
  e.text = std::move(op);
  e.children = {std::move(lhs), std::move(rhs)};
  return e;
}

Expr Expr::unary(std::string op, Expr operand) {
  Expr e;
  e.kind = Kind::Unary;
  e.text = std::move(op);
  e.children.push_back(std::move(operand));
  return e;
}

Expr Expr::postfix(std::string op, Expr operand) {
  Expr e;
  e.kind = Kind::Postfix;
  e.text = std::move(op);
  e.children.push_back(std::move(operand));
  return e;
}

Expr Expr::assign(std::string op, Expr target, Expr value) {
  Expr e;
  e.kind = Kind::Assign;
  e.text = std::move(op);
  e.children = {std::move(target), std::move(value)};
  return e;
}

Stmt Stmt::local(std::string type, std::string name, std::optional<Expr> init) {
  Stmt s;
  s.kind = Kind::LocalVar;
  s.type = std::move(type);
  s.name = std::move(name);
  s.expr = std::move(init);
  return s;
}

Stmt Stmt::expression(Expr e) {
  Stmt s;
  s.kind = Kind::ExprStmt;
  s.expr = std::move(e);
  return s;
}

Stmt Stmt::ret(std::optional<Expr> value) {
  Stmt s;
  s.kind = Kind::Return;
  s.expr = std::move(value);
  return s;
}

Stmt Stmt::empty() { return Stmt{}; }

bool is_control(Stmt::Kind kind) {
  return kind == Stmt::Kind::If || kind == Stmt::Kind::While || kind == Stmt::Kind::For ||
         kind == Stmt::Kind::Try;
}

std::size_t block_count(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::If: return s.has_else ? 2 : 1;
    case Stmt::Kind::While:
    case Stmt::Kind::For: return 1;
    case Stmt::Kind::Try: return 1 + s.catches.size() + (s.has_finally ? 1 : 0);
    default: return 0;
  }
}

const std::vector<Stmt>& block(const Stmt& s, std::size_t i) {
  if (i >= block_count(s)) throw PathError("statement has no block " + std::to_string(i));
  if (s.kind == Stmt::Kind::If) return i == 0 ? s.body : s.else_body;
  if (s.kind == Stmt::Kind::Try) {
    if (i == 0) return s.body;
    if (i <= s.catches.size()) return s.catches[i - 1].body;
    return s.finally_body;
  }
  return s.body;
}

std::vector<Stmt>& block(Stmt& s, std::size_t i) {
  return const_cast<std::vector<Stmt>&>(block(static_cast<const Stmt&>(s), i));
}

Stmt shell(const Stmt& s) {
  Stmt out = s;
  for (std::size_t b = 0; b < block_count(out); ++b) block(out, b).clear();
  return out;
}

std::string to_string(const StatementPath& path) {
  std::string out;
  for (const auto& step : path) {
    if (!out.empty()) out += '/';
    if (step.block != 0 || &step != &path.front()) out += std::to_string(step.block) + ":";
    out += std::to_string(step.index);
  }
  return out.empty() ? "<root>" : out;
}

StatementPath parse_path(std::string_view text) {
  StatementPath out;
  if (text == "<root>") return out;
  auto number = [&](std::string_view part) {
    if (part.empty() || part.size() > 9) throw PathError("malformed path '" + std::string(text) + "'");
    std::uint32_t v = 0;
    for (char c : part) {
      if (c < '0' || c > '9') throw PathError("malformed path '" + std::string(text) + "'");
      v = v * 10 + static_cast<std::uint32_t>(c - '0');
    }
    return v;
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('/', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view piece = text.substr(start, end - start);
    auto colon = piece.find(':');
    if (colon == std::string_view::npos) out.push_back({0, number(piece)});
    else out.push_back({number(piece.substr(0, colon)), number(piece.substr(colon + 1))});
    start = end + 1;
  }
  return out;
}

// ---- addressing ---------------------------------------------------------------

namespace {

void collect_paths(const std::vector<Stmt>& body, StatementPath& prefix, std::uint32_t blk, StatementSet& out) {
  for (std::uint32_t i = 0; i < body.size(); ++i) {
    prefix.push_back({blk, i});
    out.insert(prefix);
    const Stmt& s = body[i];
    for (std::size_t b = 0; b < block_count(s); ++b)
      collect_paths(block(s, b), prefix, static_cast<std::uint32_t>(b), out);
    prefix.pop_back();
  }
}

}  // namespace

StatementSet statement_universe(const MethodUnit& m) {
  StatementSet out;
  StatementPath prefix;
  collect_paths(m.body, prefix, 0, out);
  return out;
}

const Stmt& statement_at(const MethodUnit& m, const StatementPath& path) {
  if (path.empty()) throw PathError("empty statement path");
  const std::vector<Stmt>* body = &m.body;
  const Stmt* s = nullptr;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& step = path[k];
    if (k == 0) {
      if (step.block != 0) throw PathError("bad path " + to_string(path));
    } else {
      if (step.block >= block_count(*s)) throw PathError("bad path " + to_string(path));
      body = &block(*s, step.block);
    }
    if (step.index >= body->size()) throw PathError("bad path " + to_string(path));
    s = &(*body)[step.index];
  }
  return *s;
}

Stmt& statement_at(MethodUnit& m, const StatementPath& path) {
  return const_cast<Stmt&>(statement_at(static_cast<const MethodUnit&>(m), path));
}

bool contains_path(const MethodUnit& m, const StatementPath& path) {
  try {
    statement_at(m, path);
    return true;
  } catch (const PathError&) {
    return false;
  }
}

namespace {

void restrict_into(const std::vector<Stmt>& body, StatementPath& prefix, std::uint32_t blk,
                   const StatementSet& keep, std::vector<Stmt>& out) {
  for (std::uint32_t i = 0; i < body.size(); ++i) {
    prefix.push_back({blk, i});
    const Stmt& s = body[i];
    bool kept = keep.count(prefix) > 0;
    if (!is_control(s)) {
      if (kept) out.push_back(s);
    } else if (kept) {
      Stmt copy = shell(s);
      for (std::size_t b = 0; b < block_count(s); ++b)
        restrict_into(block(s, b), prefix, static_cast<std::uint32_t>(b), keep, block(copy, b));
      out.push_back(std::move(copy));
    } else {
      // Dropped predicate: kept body elements move up to this level.
      for (std::size_t b = 0; b < block_count(s); ++b)
        restrict_into(block(s, b), prefix, static_cast<std::uint32_t>(b), keep, out);
    }
    prefix.pop_back();
  }
}

}  // namespace

MethodUnit restrict(const MethodUnit& m, const StatementSet& keep) {
  for (const auto& p : keep) {
    if (!contains_path(m, p)) throw PathError("path " + to_string(p) + " not in method " + m.header.name);
  }
  MethodUnit out;
  out.header = m.header;
  StatementPath prefix;
  restrict_into(m.body, prefix, 0, keep, out.body);
  return out;
}

// ---- tree view ----------------------------------------------------------------

std::size_t AstNode::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::string label_kind(std::string_view label) {
  auto p = label.find(':');
  return std::string(p == std::string_view::npos ? label : label.substr(0, p));
}

std::string label_value(std::string_view label) {
  auto p = label.find(':');
  return p == std::string_view::npos ? std::string() : std::string(label.substr(p + 1));
}

namespace {

AstNode leaf(std::string label) { return AstNode{std::move(label), {}}; }

AstNode block_tree(const std::vector<Stmt>& body) {
  AstNode n{"Block", {}};
  for (const auto& s : body) n.children.push_back(to_tree(s));
  return n;
}

}  // namespace

AstNode to_tree(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Name: return leaf("Name:" + e.text);
    case Expr::Kind::Literal: return leaf("Lit:" + std::string(literal_kind_name(e.literal)) + ":" + e.text);
    case Expr::Kind::Field: return AstNode{"Field", {to_tree(e.children[0]), leaf("Name:" + e.text)}};
    case Expr::Kind::Call: {
      AstNode n{"Call", {}};
      for (const auto& c : e.children) n.children.push_back(to_tree(c));
      return n;
    }
    case Expr::Kind::Index: return AstNode{"Index", {to_tree(e.children[0]), to_tree(e.children[1])}};
    case Expr::Kind::Binary:
      return AstNode{"Binary", {leaf("Op:" + e.text), to_tree(e.children[0]), to_tree(e.children[1])}};
    case Expr::Kind::Unary: return AstNode{"Unary", {leaf("Op:" + e.text), to_tree(e.children[0])}};
    case Expr::Kind::Postfix: return AstNode{"Postfix", {leaf("Op:" + e.text), to_tree(e.children[0])}};
    case Expr::Kind::Assign:
      return AstNode{"Assign", {leaf("Op:" + e.text), to_tree(e.children[0]), to_tree(e.children[1])}};
    case Expr::Kind::New: {
      AstNode n{"New", {leaf("Type:" + e.text)}};
      for (const auto& c : e.children) n.children.push_back(to_tree(c));
      return n;
    }
    case Expr::Kind::NewArray: return AstNode{"NewArray", {leaf("Type:" + e.text), to_tree(e.children[0])}};
  }
  return leaf("?");
}

AstNode to_tree(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::LocalVar: {
      AstNode n{"LocalVar", {leaf("Type:" + s.type), leaf("Name:" + s.name)}};
      if (s.expr) n.children.push_back(to_tree(*s.expr));
      return n;
    }
    case Stmt::Kind::ExprStmt: return AstNode{"ExprStmt", {to_tree(*s.expr)}};
    case Stmt::Kind::Return: {
      AstNode n{"Return", {}};
      if (s.expr) n.children.push_back(to_tree(*s.expr));
      return n;
    }
    case Stmt::Kind::Throw: return AstNode{"Throw", {to_tree(*s.expr)}};
    case Stmt::Kind::Break: return leaf("Break");
    case Stmt::Kind::Continue: return leaf("Continue");
    case Stmt::Kind::Empty: return leaf("Empty");
    case Stmt::Kind::If: {
      AstNode n{"If", {to_tree(*s.expr), block_tree(s.body)}};
      if (s.has_else) n.children.push_back(block_tree(s.else_body));
      return n;
    }
    case Stmt::Kind::While: return AstNode{"While", {to_tree(*s.expr), block_tree(s.body)}};
    case Stmt::Kind::For: {
      AstNode init{"ForInit", {}};
      for (const auto& i : s.init) init.children.push_back(to_tree(i));
      AstNode cond{"ForCond", {}};
      if (s.expr) cond.children.push_back(to_tree(*s.expr));
      AstNode upd{"ForUpdate", {}};
      for (const auto& u : s.update) upd.children.push_back(to_tree(u));
      return AstNode{"For", {std::move(init), std::move(cond), std::move(upd), block_tree(s.body)}};
    }
    case Stmt::Kind::Try: {
      AstNode n{"Try", {block_tree(s.body)}};
      for (const auto& c : s.catches)
        n.children.push_back(AstNode{"Catch", {leaf("Type:" + c.type), leaf("Name:" + c.name), block_tree(c.body)}});
      if (s.has_finally) n.children.push_back(AstNode{"Finally", {block_tree(s.finally_body)}});
      return n;
    }
  }
  return leaf("?");
}

AstNode to_tree(const MethodHeader& h) {
  AstNode mods{"Modifiers", {}};
  for (const auto& m : h.modifiers) mods.children.push_back(leaf("Mod:" + m));
  AstNode params{"Params", {}};
  for (const auto& p : h.params)
    params.children.push_back(AstNode{"Param", {leaf("Type:" + p.type), leaf("Name:" + p.name)}});
  AstNode throws{"Throws", {}};
  for (const auto& t : h.throws) throws.children.push_back(leaf("Type:" + t));
  return AstNode{"Header",
                 {std::move(mods), leaf("Type:" + h.result_type), leaf("Name:" + h.name), std::move(params),
                  std::move(throws)}};
}

AstNode to_tree(const MethodUnit& m) {
  AstNode body{"Body", {}};
  for (const auto& s : m.body) body.children.push_back(to_tree(s));
  return AstNode{"Method", {to_tree(m.header), std::move(body)}};
}

namespace {

[[noreturn]] void bad(const AstNode& n, const std::string& why) {
  throw ArityError("invalid '" + n.label + "' node: " + why);
}

void want_children(const AstNode& n, std::size_t lo, std::size_t hi) {
  if (n.children.size() < lo || n.children.size() > hi) bad(n, "child count " + std::to_string(n.children.size()));
}

bool valid_identifier(const std::string& s) {
  if (s.empty() || is_reserved_word(s)) return false;
  auto toks = tokenize(s);
  return toks.size() == 2 && toks[0].kind == Token::Kind::Ident;
}

std::string leaf_value(const AstNode& n, std::string_view kind) {
  if (!n.children.empty() || label_kind(n.label) != kind) bad(n, "expected " + std::string(kind) + " leaf");
  return label_value(n.label);
}

std::string ident_leaf(const AstNode& n) {
  std::string v = leaf_value(n, "Name");
  if (!valid_identifier(v) && v != "this" && v != "super") bad(n, "not an identifier");
  return v;
}

std::string type_leaf(const AstNode& n) {
  std::string v = leaf_value(n, "Type");
  if (v.empty()) bad(n, "empty type");
  return v;
}

std::string op_leaf(const AstNode& n) { return leaf_value(n, "Op"); }

std::vector<Stmt> block_from(const AstNode& n) {
  if (n.label != "Block") bad(n, "expected Block");
  std::vector<Stmt> out;
  for (const auto& c : n.children) out.push_back(stmt_from_tree(c));
  return out;
}

bool is_binary_op(const std::string& op) {
  return op == "||" || op == "&&" || op == "|" || op == "^" || op == "&" || op == "==" || op == "!=" ||
         op == "<" || op == ">" || op == "<=" || op == ">=" || op == "<<" || op == ">>" || op == ">>>" ||
         op == "+" || op == "-" || op == "*" || op == "/" || op == "%";
}

}  // namespace

Expr expr_from_tree(const AstNode& n) {
  const std::string k = label_kind(n.label);
  if (k == "Name") return Expr::name(ident_leaf(n));
  if (k == "Lit") {
    if (!n.children.empty()) bad(n, "literal with children");
    std::string v = label_value(n.label);
    auto p = v.find(':');
    if (p == std::string::npos) bad(n, "literal without kind");
    auto kind = literal_kind_from(v.substr(0, p));
    if (!kind) bad(n, "unknown literal kind");
    std::string lexeme = v.substr(p + 1);
    auto toks = tokenize(lexeme);
    if (toks.size() != 2 || toks[0].kind != Token::Kind::Literal || toks[0].literal != *kind)
      bad(n, "lexeme inconsistent with kind");
    return Expr::lit(*kind, lexeme);
  }
  if (n.label == "Field") {
    want_children(n, 2, 2);
    return Expr::field(expr_from_tree(n.children[0]), ident_leaf(n.children[1]));
  }
  if (n.label == "Call") {
    want_children(n, 1, SIZE_MAX);
    std::vector<Expr> args;
    for (std::size_t i = 1; i < n.children.size(); ++i) args.push_back(expr_from_tree(n.children[i]));
    return Expr::call(expr_from_tree(n.children[0]), std::move(args));
  }
  if (n.label == "Index") {
    want_children(n, 2, 2);
    return Expr::index(expr_from_tree(n.children[0]), expr_from_tree(n.children[1]));
  }
  if (n.label == "Binary") {
    want_children(n, 3, 3);
    std::string op = op_leaf(n.children[0]);
    if (!is_binary_op(op)) bad(n, "bad binary operator");
    return Expr::binary(op, expr_from_tree(n.children[1]), expr_from_tree(n.children[2]));
  }
  if (n.label == "Unary") {
    want_children(n, 2, 2);
    std::string op = op_leaf(n.children[0]);
    if (op != "+" && op != "-" && op != "!" && op != "~" && op != "++" && op != "--") bad(n, "bad unary operator");
    return Expr::unary(op, expr_from_tree(n.children[1]));
  }
  if (n.label == "Postfix") {
    want_children(n, 2, 2);
    std::string op = op_leaf(n.children[0]);
    if (op != "++" && op != "--") bad(n, "bad postfix operator");
    return Expr::postfix(op, expr_from_tree(n.children[1]));
  }
  if (n.label == "Assign") {
    want_children(n, 3, 3);
    std::string op = op_leaf(n.children[0]);
    if (op != "=" && op != "+=" && op != "-=" && op != "*=" && op != "/=" && op != "%=" && op != "&=" &&
        op != "|=" && op != "^=" && op != "<<=" && op != ">>=" && op != ">>>=")
      bad(n, "bad assignment operator");
    return Expr::assign(op, expr_from_tree(n.children[1]), expr_from_tree(n.children[2]));
  }
  if (n.label == "New") {
    want_children(n, 1, SIZE_MAX);
    Expr e;
    e.kind = Expr::Kind::New;
    e.text = type_leaf(n.children[0]);
    for (std::size_t i = 1; i < n.children.size(); ++i) e.children.push_back(expr_from_tree(n.children[i]));
    return e;
  }
  if (n.label == "NewArray") {
    want_children(n, 2, 2);
    Expr e;
    e.kind = Expr::Kind::NewArray;
    e.text = type_leaf(n.children[0]);
    e.children.push_back(expr_from_tree(n.children[1]));
    return e;
  }
  bad(n, "not an expression");
}

Stmt stmt_from_tree(const AstNode& n) {
  const std::string& l = n.label;
  if (l == "LocalVar") {
    want_children(n, 2, 3);
    std::optional<Expr> init;
    if (n.children.size() == 3) init = expr_from_tree(n.children[2]);
    return Stmt::local(type_leaf(n.children[0]), ident_leaf(n.children[1]), std::move(init));
  }
  if (l == "ExprStmt") {
    want_children(n, 1, 1);
    return Stmt::expression(expr_from_tree(n.children[0]));
  }
  if (l == "Return") {
    want_children(n, 0, 1);
    if (n.children.empty()) return Stmt::ret();
    return Stmt::ret(expr_from_tree(n.children[0]));
  }
  Stmt s;
  if (l == "Throw") {
    want_children(n, 1, 1);
    s.kind = Stmt::Kind::Throw;
    s.expr = expr_from_tree(n.children[0]);
    return s;
  }
  if (l == "Break" || l == "Continue" || l == "Empty") {
    want_children(n, 0, 0);
    s.kind = l == "Break" ? Stmt::Kind::Break : l == "Continue" ? Stmt::Kind::Continue : Stmt::Kind::Empty;
    return s;
  }
  if (l == "If") {
    want_children(n, 2, 3);
    s.kind = Stmt::Kind::If;
    s.expr = expr_from_tree(n.children[0]);
    s.body = block_from(n.children[1]);
    if (n.children.size() == 3) {
      s.has_else = true;
      s.else_body = block_from(n.children[2]);
    }
    return s;
  }
  if (l == "While") {
    want_children(n, 2, 2);
    s.kind = Stmt::Kind::While;
    s.expr = expr_from_tree(n.children[0]);
    s.body = block_from(n.children[1]);
    return s;
  }
  if (l == "For") {
    want_children(n, 4, 4);
    s.kind = Stmt::Kind::For;
    const auto& init = n.children[0];
    const auto& cond = n.children[1];
    const auto& upd = n.children[2];
    if (init.label != "ForInit" || cond.label != "ForCond" || upd.label != "ForUpdate") bad(n, "malformed header");
    want_children(init, 0, 1);
    want_children(cond, 0, 1);
    for (const auto& c : init.children) {
      Stmt is = stmt_from_tree(c);
      if (is.kind != Stmt::Kind::LocalVar && is.kind != Stmt::Kind::ExprStmt) bad(n, "bad for-init");
      s.init.push_back(std::move(is));
    }
    if (!cond.children.empty()) s.expr = expr_from_tree(cond.children[0]);
    for (const auto& u : upd.children) s.update.push_back(expr_from_tree(u));
    s.body = block_from(n.children[3]);
    return s;
  }
  if (l == "Try") {
    want_children(n, 2, SIZE_MAX);
    s.kind = Stmt::Kind::Try;
    s.body = block_from(n.children[0]);
    for (std::size_t i = 1; i < n.children.size(); ++i) {
      const auto& c = n.children[i];
      if (c.label == "Catch") {
        if (s.has_finally) bad(n, "catch after finally");
        want_children(c, 3, 3);
        s.catches.push_back({type_leaf(c.children[0]), ident_leaf(c.children[1]), block_from(c.children[2])});
      } else if (c.label == "Finally" && !s.has_finally && i + 1 == n.children.size()) {
        want_children(c, 1, 1);
        s.has_finally = true;
        s.finally_body = block_from(c.children[0]);
      } else {
        bad(n, "unexpected child " + c.label);
      }
    }
    return s;
  }
  bad(n, "not a statement");
}

MethodUnit method_from_tree(const AstNode& n) {
  if (n.label != "Method") bad(n, "expected Method");
  want_children(n, 2, 2);
  const AstNode& h = n.children[0];
  if (h.label != "Header") bad(h, "expected Header");
  want_children(h, 5, 5);
  MethodUnit m;
  if (h.children[0].label != "Modifiers" || h.children[3].label != "Params" || h.children[4].label != "Throws")
    bad(h, "malformed header");
  for (const auto& mod : h.children[0].children) m.header.modifiers.push_back(leaf_value(mod, "Mod"));
  m.header.result_type = type_leaf(h.children[1]);
  m.header.name = ident_leaf(h.children[2]);
  for (const auto& p : h.children[3].children) {
    if (p.label != "Param") bad(p, "expected Param");
    want_children(p, 2, 2);
    Param param{type_leaf(p.children[0]), ident_leaf(p.children[1])};
    for (const auto& q : m.header.params)
      if (q.name == param.name) bad(p, "duplicate parameter");
    m.header.params.push_back(std::move(param));
  }
  for (const auto& t : h.children[4].children) m.header.throws.push_back(type_leaf(t));
  const AstNode& b = n.children[1];
  if (b.label != "Body") bad(b, "expected Body");
  for (const auto& c : b.children) m.body.push_back(stmt_from_tree(c));
  return m;
}

TreePath tree_path(const MethodUnit& m, const StatementPath& path) {
  if (path.empty()) throw PathError("empty statement path");
  TreePath out{1};
  const Stmt* parent = nullptr;
  const std::vector<Stmt>* body = &m.body;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& step = path[k];
    if (k > 0) {
      if (step.block >= block_count(*parent)) throw PathError("bad path " + to_string(path));
      body = &block(*parent, step.block);
      switch (parent->kind) {
        case Stmt::Kind::If: out.push_back(1 + step.block); break;
        case Stmt::Kind::While: out.push_back(1); break;
        case Stmt::Kind::For: out.push_back(3); break;
        case Stmt::Kind::Try:
          out.push_back(step.block);
          if (step.block >= 1) out.push_back(step.block <= parent->catches.size() ? 2 : 0);
          break;
        default: throw PathError("bad path " + to_string(path));
      }
    } else if (step.block != 0) {
      throw PathError("bad path " + to_string(path));
    }
    if (step.index >= body->size()) throw PathError("bad path " + to_string(path));
    out.push_back(step.index);
    parent = &(*body)[step.index];
  }
  return out;
}

}  // namespace patic
