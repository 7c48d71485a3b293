#include <algorithm>
#include <memory>

#include "patic/errors.hpp"
#include "patic/grammar.hpp"
#include "syntax.hpp"

namespace patic {

Symbol term(std::string token) { return {std::move(token), true, false}; }
Symbol nonterm(std::string name, bool optional) { return {std::move(name), false, optional}; }

namespace {

// Derivation tree: one production per node, children for the non-terminals
// it expands (absent optional symbols have none).
struct DNode {
  struct Part {
    Symbol symbol;
    std::unique_ptr<DNode> child;
  };
  std::string lhs;
  std::vector<Part> parts;

  explicit DNode(std::string l) : lhs(std::move(l)) {}
  DNode& t(std::string token) {
    parts.push_back({term(std::move(token)), nullptr});
    return *this;
  }
  DNode& ts(const std::vector<std::string>& tokens) {
    for (const auto& tok : tokens) t(tok);
    return *this;
  }
  DNode& n(std::unique_ptr<DNode> child) {
    std::string name = child->lhs;
    parts.push_back({nonterm(std::move(name)), std::move(child)});
    return *this;
  }
  // Optional non-terminal, present when `child` is non-null.
  DNode& o(std::string name, std::unique_ptr<DNode> child) {
    parts.push_back({nonterm(std::move(name), true), std::move(child)});
    return *this;
  }
};

using Node = std::unique_ptr<DNode>;

Node make(std::string lhs) { return std::make_unique<DNode>(std::move(lhs)); }

void preorder(const DNode& d, DerivationTrace& out) {
  TraceStep step{{d.lhs, {}}, {}};
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    step.rule.rhs.push_back(d.parts[i].symbol);
    if (!d.parts[i].symbol.terminal && !d.parts[i].child) step.skipped.push_back(i);
  }
  out.push_back(std::move(step));
  for (const auto& part : d.parts)
    if (part.child) preorder(*part.child, out);
}

void yield(const DNode& d, std::vector<std::string>& out) {
  for (const auto& part : d.parts) {
    if (part.symbol.terminal) out.push_back(part.symbol.name);
    else if (part.child) yield(*part.child, out);
  }
}

std::vector<std::string> yield_of(const DNode& d) {
  std::vector<std::string> out;
  yield(d, out);
  return out;
}

Node leaf(const char* lhs, const std::vector<std::string>& tokens) {
  auto d = make(lhs);
  d->ts(tokens);
  return d;
}

Node identifier(const std::string& name) { return leaf("identifier", {name}); }
Node type_node(const std::string& type) { return leaf("type", token_texts(type)); }

// ---- expressions -------------------------------------------------------------

Node expression(const Expr& e);

Node child_expr(const Expr& e, int min_prec) {
  if (syntax::precedence(e) >= min_prec) return expression(e);
  auto d = make("expression");
  d->t("(").n(expression(e)).t(")");
  return d;
}

Node argument_list(const std::vector<Expr>& args, std::size_t from) {
  if (args.size() <= from) return nullptr;
  Node list;
  for (std::size_t i = from; i < args.size(); ++i) {
    auto d = make("argument list");
    if (list) d->n(std::move(list)).t(",");
    d->n(child_expr(args[i], 0));
    list = std::move(d);
  }
  return list;
}

Node expression(const Expr& e) {
  auto d = make("expression");
  switch (e.kind) {
    case Expr::Kind::Name: d->n(identifier(e.text)); break;
    case Expr::Kind::Literal: d->n(leaf("literal", {e.text})); break;
    case Expr::Kind::Field:
      d->n(child_expr(e.children[0], syntax::kPostfixPrecedence)).t(".").n(identifier(e.text));
      break;
    case Expr::Kind::Call:
      d->n(child_expr(e.children[0], syntax::kPostfixPrecedence)).t("(").o("argument list", argument_list(e.children, 1)).t(")");
      break;
    case Expr::Kind::Index:
      d->n(child_expr(e.children[0], syntax::kPostfixPrecedence)).t("[").n(child_expr(e.children[1], 0)).t("]");
      break;
    case Expr::Kind::Binary: {
      int p = syntax::binary_precedence(e.text);
      d->n(child_expr(e.children[0], p)).n(leaf("binary operator", {e.text})).n(child_expr(e.children[1], p + 1));
      break;
    }
    case Expr::Kind::Unary:
      d->n(leaf("unary operator", {e.text})).n(child_expr(e.children[0], syntax::kUnaryPrecedence));
      break;
    case Expr::Kind::Postfix:
      d->n(child_expr(e.children[0], syntax::kPostfixPrecedence)).n(leaf("postfix operator", {e.text}));
      break;
    case Expr::Kind::Assign:
      d->n(child_expr(e.children[0], 1)).n(leaf("assignment operator", {e.text})).n(child_expr(e.children[1], 0));
      break;
    case Expr::Kind::New:
      d->t("new").n(type_node(e.text)).t("(").o("argument list", argument_list(e.children, 0)).t(")");
      break;
    case Expr::Kind::NewArray:
      d->t("new").n(type_node(e.text)).t("[").n(child_expr(e.children[0], 0)).t("]");
      break;
  }
  return d;
}

// ---- statements ----------------------------------------------------------------

Node block_statements(const std::vector<Stmt>& stmts, std::size_t from, std::size_t to);
Node statement(const Stmt& s);

Node block(const std::vector<Stmt>& body) {
  auto d = make("block");
  d->t("{").o("block statements", block_statements(body, 0, body.size())).t("}");
  return d;
}

Node block_statement(const Stmt& s) {
  auto d = make("block statement");
  if (s.kind == Stmt::Kind::LocalVar) {
    auto l = make("local variable declaration statement");
    l->n(type_node(s.type)).n(identifier(s.name));
    if (s.expr) l->t("=").n(child_expr(*s.expr, 0));
    l->t(";");
    d->n(std::move(l));
  } else {
    d->n(statement(s));
  }
  return d;
}

Node block_statements(const std::vector<Stmt>& stmts, std::size_t from, std::size_t to) {
  Node list;
  for (std::size_t i = from; i < to; ++i) {
    auto d = make("block statements");
    if (list) d->n(std::move(list));
    d->n(block_statement(stmts[i]));
    list = std::move(d);
  }
  return list;
}

Node for_init(const Stmt& s) {
  auto d = make("for init");
  if (s.kind == Stmt::Kind::LocalVar) {
    d->n(type_node(s.type)).n(identifier(s.name));
    if (s.expr) d->t("=").n(child_expr(*s.expr, 0));
  } else {
    d->n(child_expr(*s.expr, 0));
  }
  return d;
}

Node for_update(const std::vector<Expr>& update) {
  Node list;
  for (const auto& e : update) {
    auto d = make("for update");
    if (list) d->n(std::move(list)).t(",");
    d->n(child_expr(e, 0));
    list = std::move(d);
  }
  return list;
}

Node catch_clause(const CatchClause& c) {
  auto d = make("catch clause");
  d->t("catch").t("(").n(type_node(c.type)).n(identifier(c.name)).t(")").n(block(c.body));
  return d;
}

Node statement(const Stmt& s) {
  auto d = make("statement");
  switch (s.kind) {
    case Stmt::Kind::LocalVar:
      throw DataError("local declaration outside a block");
    case Stmt::Kind::ExprStmt: d->n(child_expr(*s.expr, 0)).t(";"); break;
    case Stmt::Kind::Return:
      d->t("return").o("expression", s.expr ? child_expr(*s.expr, 0) : nullptr).t(";");
      break;
    case Stmt::Kind::Throw: d->t("throw").n(child_expr(*s.expr, 0)).t(";"); break;
    case Stmt::Kind::Break: d->t("break").t(";"); break;
    case Stmt::Kind::Continue: d->t("continue").t(";"); break;
    case Stmt::Kind::Empty: d->t(";"); break;
    case Stmt::Kind::If:
      d->t("if").t("(").n(child_expr(*s.expr, 0)).t(")").n(block(s.body));
      if (s.has_else) d->t("else").n(block(s.else_body));
      break;
    case Stmt::Kind::While: d->t("while").t("(").n(child_expr(*s.expr, 0)).t(")").n(block(s.body)); break;
    case Stmt::Kind::For:
      d->t("for").t("(").o("for init", s.init.empty() ? nullptr : for_init(s.init[0])).t(";");
      d->o("expression", s.expr ? child_expr(*s.expr, 0) : nullptr).t(";");
      d->o("for update", for_update(s.update)).t(")").n(block(s.body));
      break;
    case Stmt::Kind::Try: {
      d->t("try").n(block(s.body));
      Node list;
      for (const auto& c : s.catches) {
        auto l = make("catches");
        if (list) l->n(std::move(list));
        l->n(catch_clause(c));
        list = std::move(l);
      }
      if (s.has_finally) {
        auto f = make("finally");
        f->t("finally").n(block(s.finally_body));
        d->o("catches", std::move(list)).n(std::move(f));
      } else {
        d->n(std::move(list));
      }
      break;
    }
  }
  return d;
}

// ---- header --------------------------------------------------------------------

Node header(const MethodHeader& h) {
  auto d = make("method header");
  Node mods;
  for (const auto& m : h.modifiers) {
    auto l = make("method modifiers");
    if (mods) l->n(std::move(mods));
    l->n(leaf("method modifier", {m}));
    mods = std::move(l);
  }
  d->o("method modifiers", std::move(mods));
  d->n(leaf("result type", token_texts(h.result_type)));
  auto decl = make("method declarator");
  decl->n(identifier(h.name)).t("(");
  Node params;
  if (!h.params.empty()) {
    params = make("seed parameter");
    for (std::size_t i = 0; i < h.params.size(); ++i) {
      if (i) params->t(",");
      params->ts(token_texts(h.params[i].type)).t(h.params[i].name);
    }
  }
  decl->o("seed parameter", std::move(params)).t(")");
  d->n(std::move(decl));
  Node throws;
  if (!h.throws.empty()) {
    throws = make("throws");
    throws->t("throws");
    for (std::size_t i = 0; i < h.throws.size(); ++i) {
      if (i) throws->t(",");
      throws->ts(token_texts(h.throws[i]));
    }
  }
  d->o("throws", std::move(throws));
  return d;
}

// ---- seed layout ---------------------------------------------------------------

bool has_prefix(const StatementPath& p, const StatementPath& prefix) {
  return p.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), p.begin());
}

struct Layout {
  const StatementSet& anchor;

  bool holds_anchor(const StatementPath& p) const {
    auto it = anchor.lower_bound(p);
    return it != anchor.end() && has_prefix(*it, p);
  }

  // Statements [from, to) of a block into `d`: anchor-holding statements
  // inline, runs of other statements as one optional <block statements>.
  // Gaps at the ends only when `edges` is set.
  void statements(DNode& d, const std::vector<Stmt>& body, const StatementPath& parent, std::uint32_t blk,
                  std::size_t from, std::size_t to, bool edges) const {
    std::size_t run = from;
    bool first = true;
    for (std::size_t i = from; i < to; ++i) {
      StatementPath p = parent;
      p.push_back({blk, static_cast<std::uint32_t>(i)});
      if (!holds_anchor(p)) continue;
      if (edges || !first) d.o("block statements", block_statements(body, run, i));
      item(d, body[i], p);
      run = i + 1;
      first = false;
    }
    if (edges) d.o("block statements", block_statements(body, run, to));
  }

  void inner_block(DNode& d, const std::vector<Stmt>& body, const StatementPath& p, std::uint32_t blk,
                   bool is_anchor) const {
    StatementPath probe = p;
    probe.push_back({blk, 0});
    bool holds = false;
    for (std::size_t i = 0; i < body.size() && !holds; ++i) {
      probe.back().index = static_cast<std::uint32_t>(i);
      holds = holds_anchor(probe);
    }
    if (!holds && !is_anchor) {
      d.n(block(body));
      return;
    }
    d.t("{");
    statements(d, body, p, blk, 0, body.size(), true);
    d.t("}");
  }

  void item(DNode& d, const Stmt& s, const StatementPath& p) const {
    const bool is_anchor = anchor.count(p) > 0;
    if (is_anchor && !is_control(s)) {
      d.ts(yield_of(*block_statement(s)));
      return;
    }
    auto exact = [&](const Expr& e) { d.ts(yield_of(*child_expr(e, 0))); };
    switch (s.kind) {
      case Stmt::Kind::If:
      case Stmt::Kind::While:
        d.t(s.kind == Stmt::Kind::If ? "if" : "while").t("(");
        if (is_anchor) exact(*s.expr);
        else d.n(child_expr(*s.expr, 0));
        d.t(")");
        inner_block(d, s.body, p, 0, is_anchor);
        if (s.has_else) {
          d.t("else");
          inner_block(d, s.else_body, p, 1, is_anchor);
        }
        break;
      case Stmt::Kind::For:
        d.t("for").t("(");
        if (is_anchor) {
          if (!s.init.empty()) d.ts(yield_of(*for_init(s.init[0])));
          d.t(";");
          if (s.expr) exact(*s.expr);
          d.t(";");
          if (!s.update.empty()) d.ts(yield_of(*for_update(s.update)));
        } else {
          d.o("for init", s.init.empty() ? nullptr : for_init(s.init[0])).t(";");
          d.o("expression", s.expr ? child_expr(*s.expr, 0) : nullptr).t(";");
          d.o("for update", for_update(s.update));
        }
        d.t(")");
        inner_block(d, s.body, p, 0, is_anchor);
        break;
      case Stmt::Kind::Try: {
        d.t("try");
        inner_block(d, s.body, p, 0, is_anchor);
        for (std::size_t c = 0; c < s.catches.size(); ++c) {
          d.t("catch").t("(");
          if (is_anchor) {
            d.ts(token_texts(s.catches[c].type)).t(s.catches[c].name);
          } else {
            d.n(type_node(s.catches[c].type)).n(identifier(s.catches[c].name));
          }
          d.t(")");
          inner_block(d, s.catches[c].body, p, static_cast<std::uint32_t>(1 + c), is_anchor);
        }
        if (s.has_finally) {
          d.t("finally");
          inner_block(d, s.finally_body, p, static_cast<std::uint32_t>(1 + s.catches.size()), is_anchor);
        }
        break;
      }
      default:
        throw DataError("statement at " + to_string(p) + " holds anchors but has no blocks");
    }
  }
};

Node seed_body(const MethodUnit& m, const SeedAnchor& a) {
  for (const auto& p : a.paths)
    if (!contains_path(m, p)) throw DataError("anchor path " + to_string(p) + " is not in the method");
  Layout layout{a.paths};
  std::size_t first = m.body.size(), last = 0;
  for (std::size_t i = 0; i < m.body.size(); ++i)
    if (layout.holds_anchor({{0, static_cast<std::uint32_t>(i)}})) {
      first = std::min(first, i);
      last = i;
    }
  auto d = make("seed block statements");
  if (first == m.body.size()) throw DataError("empty anchor");
  std::string family = "seed" + std::to_string(a.family) + " core";
  auto core = make(family);
  layout.statements(*core, m.body, {}, 0, first, last + 1, false);
  auto pick = make("seed core");
  pick->n(std::move(core));
  d->o("block statements", block_statements(m.body, 0, first));
  d->n(std::move(pick));
  d->o("block statements", block_statements(m.body, last + 1, m.body.size()));
  return d;
}

Node method_node(const MethodUnit& m, const std::optional<SeedAnchor>& anchor) {
  auto d = make(kStartSymbol);
  d->n(header(m.header)).t("{");
  if (anchor && !anchor->paths.empty()) d->n(seed_body(m, *anchor));
  else d->o("block statements", block_statements(m.body, 0, m.body.size()));
  d->t("}");
  return d;
}

}  // namespace

std::vector<std::string> method_tokens(const MethodUnit& method) { return yield_of(*method_node(method, std::nullopt)); }

DerivationTrace extract_trace(const MethodUnit& method, const std::optional<SeedAnchor>& anchor) {
  DerivationTrace out;
  preorder(*method_node(method, anchor), out);
  return out;
}

std::vector<std::string> replay_trace(const DerivationTrace& trace, const std::string& start) {
  std::vector<Symbol> stack{nonterm(start)};
  std::vector<std::string> out;
  std::size_t next = 0;
  while (!stack.empty()) {
    Symbol s = std::move(stack.back());
    stack.pop_back();
    if (s.terminal) {
      out.push_back(s.name);
      continue;
    }
    if (next >= trace.size() || trace[next].rule.lhs != s.name)
      throw DataError("trace does not expand <" + s.name + "> at step " + std::to_string(next));
    const auto& step = trace[next++];
    const auto& rhs = step.rule.rhs;
    for (std::size_t i = rhs.size(); i-- > 0;) {
      bool skip = std::find(step.skipped.begin(), step.skipped.end(), i) != step.skipped.end();
      if (skip && !rhs[i].optional) throw DataError("trace skips a required symbol of <" + s.name + ">");
      if (!skip) stack.push_back(rhs[i]);
    }
  }
  if (next != trace.size()) throw DataError("trace has unused productions from step " + std::to_string(next));
  return out;
}

}  // namespace patic
