#include <algorithm>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>

#include "patic/edit.hpp"
#include "patic/errors.hpp"
#include "patic/robustness.hpp"

namespace patic {

namespace {

// ---- expression helpers ----------------------------------------------------------

template <typename E, typename F>
void walk(E& e, F&& f) {
  f(e);
  for (auto& c : e.children) walk(c, f);
}

// Expressions of a statement's shell (nested blocks excluded).
template <typename S, typename F>
void shell_exprs(S& s, F&& f) {
  if (s.expr) f(*s.expr);
  for (auto& i : s.init)
    if (i.expr) f(*i.expr);
  for (auto& u : s.update) f(u);
}

template <typename S, typename F>
void shell_nodes(S& s, F&& f) {
  shell_exprs(s, [&](auto& root) { walk(root, f); });
}

// Statements of a block tree in preorder, with their blocks.
template <typename F>
void deep_statements(const std::vector<Stmt>& body, F&& f) {
  for (const auto& s : body) {
    f(s);
    for (std::size_t b = 0; b < block_count(s); ++b) deep_statements(block(s, b), f);
  }
}

bool is_name(const Expr& e, const std::string& n) { return e.kind == Expr::Kind::Name && e.text == n; }

bool side_effect_free(const Expr& e) {
  bool ok = true;
  walk(e, [&](const Expr& x) {
    if (x.kind == Expr::Kind::Call || x.kind == Expr::Kind::Assign || x.kind == Expr::Kind::New ||
        x.kind == Expr::Kind::NewArray || x.kind == Expr::Kind::Postfix ||
        (x.kind == Expr::Kind::Unary && (x.text == "++" || x.text == "--")))
      ok = false;
  });
  return ok;
}

// Side-effect free and unable to throw.
bool pure_total(const Expr& e) {
  if (!side_effect_free(e)) return false;
  bool ok = true;
  walk(e, [&](const Expr& x) {
    if (x.kind == Expr::Kind::Index || x.kind == Expr::Kind::Field ||
        (x.kind == Expr::Kind::Binary && (x.text == "/" || x.text == "%")))
      ok = false;
  });
  return ok;
}

bool has_string_literal(const Expr& e) {
  bool found = false;
  walk(e, [&](const Expr& x) { found |= x.kind == Expr::Kind::Literal && x.literal == LiteralKind::String; });
  return found;
}

bool is_constant(const Expr& e) {
  if (e.kind == Expr::Kind::Literal) return e.literal != LiteralKind::Null;
  return e.kind == Expr::Kind::Unary && e.text == "-" && e.children[0].kind == Expr::Kind::Literal &&
         e.children[0].literal != LiteralKind::String && e.children[0].literal != LiteralKind::Bool &&
         e.children[0].literal != LiteralKind::Null;
}

bool literal_bool(const std::optional<Expr>& e, bool value) {
  return e && e->kind == Expr::Kind::Literal && e->literal == LiteralKind::Bool && e->text == (value ? "true" : "false");
}

std::optional<std::int64_t> int_constant(const Expr& e) {
  try {
    if (e.kind == Expr::Kind::Literal && e.literal == LiteralKind::Int) return std::stoll(e.text, nullptr, 0);
    if (e.kind == Expr::Kind::Unary && e.text == "-" && e.children[0].kind == Expr::Kind::Literal &&
        e.children[0].literal == LiteralKind::Int)
      return -std::stoll(e.children[0].text, nullptr, 0);
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

Expr int_expr(std::int64_t v) {
  if (v < 0) return Expr::unary("-", Expr::lit(LiteralKind::Int, std::to_string(-v)));
  return Expr::lit(LiteralKind::Int, std::to_string(v));
}

// Variables a statement shell reads and writes; callee names are not
// variables.
struct Access {
  std::set<std::string> reads, writes, receivers;
  bool calls = false;
};

std::string root_name(const Expr& e) {
  const Expr* cur = &e;
  while (cur->kind == Expr::Kind::Field || cur->kind == Expr::Kind::Index) cur = &cur->children[0];
  return cur->kind == Expr::Kind::Name ? cur->text : "";
}

void access_expr(const Expr& e, Access& a) {
  switch (e.kind) {
    case Expr::Kind::Name: a.reads.insert(e.text); return;
    case Expr::Kind::Call: {
      a.calls = true;
      const Expr& callee = e.children[0];
      if (callee.kind == Expr::Kind::Field) {
        std::string r = root_name(callee.children[0]);
        a.receivers.insert(r.empty() ? "?" : r);
        access_expr(callee.children[0], a);
      } else {
        a.receivers.insert("this");
      }
      for (std::size_t i = 1; i < e.children.size(); ++i) access_expr(e.children[i], a);
      return;
    }
    case Expr::Kind::Assign: {
      std::string r = root_name(e.children[0]);
      if (!r.empty()) a.writes.insert(r);
      if (e.text != "=" || e.children[0].kind != Expr::Kind::Name) access_expr(e.children[0], a);
      access_expr(e.children[1], a);
      return;
    }
    case Expr::Kind::Unary:
    case Expr::Kind::Postfix:
      if (e.text == "++" || e.text == "--") {
        std::string r = root_name(e.children[0]);
        if (!r.empty()) a.writes.insert(r);
      }
      break;
    default: break;
  }
  for (const auto& c : e.children) access_expr(c, a);
}

Access shell_access(const Stmt& s) {
  Access a;
  if (s.kind == Stmt::Kind::LocalVar) a.writes.insert(s.name);
  for (const auto& i : s.init)
    if (i.kind == Stmt::Kind::LocalVar) a.writes.insert(i.name);
  shell_exprs(s, [&](const Expr& e) { access_expr(e, a); });
  return a;
}

Access deep_access(const std::vector<Stmt>& body) {
  Access a;
  deep_statements(body, [&](const Stmt& s) {
    Access x = shell_access(s);
    a.reads.insert(x.reads.begin(), x.reads.end());
    a.writes.insert(x.writes.begin(), x.writes.end());
    a.receivers.insert(x.receivers.begin(), x.receivers.end());
    a.calls |= x.calls;
  });
  return a;
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::none_of(a.begin(), a.end(), [&](const std::string& x) { return b.count(x) > 0; });
}

// Variable occurrences: declarations plus non-callee name uses.
std::size_t declarations_of(const MethodUnit& m, const std::string& x) {
  std::size_t n = 0;
  for (const auto& p : m.header.params) n += p.name == x;
  deep_statements(m.body, [&](const Stmt& s) {
    n += s.kind == Stmt::Kind::LocalVar && s.name == x;
    for (const auto& i : s.init) n += i.kind == Stmt::Kind::LocalVar && i.name == x;
    for (const auto& c : s.catches) n += c.name == x;
  });
  return n;
}

void rename_uses(Expr& e, const std::string& from, const std::function<Expr()>& to, bool skip_callee = true) {
  if (is_name(e, from)) {
    e = to();
    return;
  }
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (skip_callee && e.kind == Expr::Kind::Call && i == 0 && e.children[0].kind == Expr::Kind::Name) continue;
    rename_uses(e.children[i], from, to, skip_callee);
  }
}

bool uses_name(const Expr& e, const std::string& x) {
  bool found = false;
  std::function<void(const Expr&)> go = [&](const Expr& n) {
    if (is_name(n, x)) found = true;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (n.kind == Expr::Kind::Call && i == 0 && n.children[0].kind == Expr::Kind::Name) continue;
      go(n.children[i]);
    }
  };
  go(e);
  return found;
}

bool shell_mentions(const Stmt& s, const std::string& x) {
  bool found = (s.kind == Stmt::Kind::LocalVar && s.name == x);
  for (const auto& i : s.init) found |= i.kind == Stmt::Kind::LocalVar && i.name == x;
  for (const auto& c : s.catches) found |= c.name == x;
  shell_exprs(s, [&](const Expr& e) { found |= uses_name(e, x); });
  return found;
}

bool deep_has(const std::vector<Stmt>& body, Stmt::Kind kind) {
  bool found = false;
  deep_statements(body, [&](const Stmt& s) { found |= s.kind == kind; });
  return found;
}

std::vector<StatementPath> preorder_paths(const MethodUnit& m) {
  auto u = statement_universe(m);
  return {u.begin(), u.end()};
}

// The block holding the statement at `p`, and its index there.
std::vector<Stmt>& parent_block(MethodUnit& m, const StatementPath& p) {
  if (p.size() == 1) return m.body;
  StatementPath parent(p.begin(), p.end() - 1);
  return block(statement_at(m, parent), p.back().block);
}

StatementPath child(const StatementPath& p, std::uint32_t blk, std::uint32_t idx) {
  StatementPath c = p;
  c.push_back({blk, idx});
  return c;
}

std::set<std::string> method_names(const MethodUnit& m) {
  std::set<std::string> out;
  for (const auto& t : tokenize(pretty(m)))
    if (t.kind == Token::Kind::Ident) out.insert(t.text);
  return out;
}

}  // namespace

namespace {

// ---- targeted transformations -------------------------------------------------

struct Draft {
  StatementPath site;
  StatementSet touched;
  MethodUnit method;
};

const std::vector<std::string> kFreshNames{"data", "value", "item", "result", "temp",
                                           "index", "count", "flag", "buffer", "entry"};

void rename_in_stmt(Stmt& s, const std::string& from, const std::string& to) {
  if (s.kind == Stmt::Kind::LocalVar && s.name == from) s.name = to;
  for (auto& c : s.catches)
    if (c.name == from) c.name = to;
  for (auto& i : s.init)
    if (i.kind == Stmt::Kind::LocalVar && i.name == from) i.name = to;
  shell_exprs(s, [&](Expr& e) { rename_uses(e, from, [&] { return Expr::name(to); }); });
  for (std::size_t b = 0; b < block_count(s); ++b)
    for (auto& c : block(s, b)) rename_in_stmt(c, from, to);
}

std::vector<Draft> variable_renaming(const MethodUnit& m) {
  // Declared names in order of first declaration.
  std::vector<std::pair<std::string, StatementPath>> declared;
  auto add = [&](const std::string& n, const StatementPath& p) {
    for (const auto& d : declared)
      if (d.first == n) return;
    declared.emplace_back(n, p);
  };
  for (const auto& prm : m.header.params) add(prm.name, StatementPath{});
  for (const auto& p : preorder_paths(m)) {
    const Stmt& s = statement_at(m, p);
    if (s.kind == Stmt::Kind::LocalVar) add(s.name, p);
    for (const auto& i : s.init)
      if (i.kind == Stmt::Kind::LocalVar) add(i.name, p);
    for (const auto& c : s.catches) add(c.name, p);
  }
  std::set<std::string> taken = method_names(m);
  std::vector<Draft> out;
  for (const auto& [name, site] : declared) {
    // Names also used as callees would change meaning.
    bool callee = false;
    deep_statements(m.body, [&](const Stmt& s) {
      shell_nodes(s, [&](const Expr& e) {
        callee |= e.kind == Expr::Kind::Call && is_name(e.children[0], name);
      });
    });
    if (callee) continue;
    std::string fresh;
    for (const auto& f : kFreshNames)
      if (!taken.count(f)) {
        fresh = f;
        break;
      }
    if (fresh.empty()) continue;
    Draft d;
    d.site = site;
    d.method = m;
    for (auto& prm : d.method.header.params)
      if (prm.name == name) {
        prm.name = fresh;
        d.touched.insert(StatementPath{});
      }
    for (const auto& p : preorder_paths(m))
      if (shell_mentions(statement_at(m, p), name)) d.touched.insert(p);
    for (auto& s : d.method.body) rename_in_stmt(s, name, fresh);
    out.push_back(std::move(d));
  }
  return out;
}

bool commutative(const std::string& op) { return op == "+" || op == "*" || op == "&&" || op == "||"; }

std::vector<Draft> operands_swapping(const MethodUnit& m) {
  std::vector<Draft> out;
  for (const auto& p : preorder_paths(m)) {
    std::size_t count = 0;
    shell_nodes(statement_at(m, p), [&](const Expr&) { ++count; });
    for (std::size_t k = 0; k < count; ++k) {
      Draft d{p, {p}, m};
      std::size_t at = 0;
      bool done = false;
      shell_nodes(statement_at(d.method, p), [&](Expr& e) {
        if (at++ != k || e.kind != Expr::Kind::Binary || !commutative(e.text)) return;
        const Expr& a = e.children[0];
        const Expr& b = e.children[1];
        if (!side_effect_free(a) || !side_effect_free(b)) return;
        if (e.text == "+" && (has_string_literal(a) || has_string_literal(b))) return;
        // Short-circuit operands may guard each other.
        auto atomic = [](const Expr& x) { return x.kind == Expr::Kind::Name || x.kind == Expr::Kind::Literal; };
        if ((e.text == "&&" || e.text == "||") && (!atomic(a) || !atomic(b))) return;
        if (a == b) return;
        std::swap(e.children[0], e.children[1]);
        done = true;
      });
      if (done) out.push_back(std::move(d));
    }
  }
  return out;
}

using Bindings = std::vector<std::pair<std::string, Expr>>;

bool match(const Expr& pat, const Expr& e, Bindings& b) {
  if (pat.kind == Expr::Kind::Name && !pat.text.empty() && pat.text[0] == '$') {
    for (const auto& [k, v] : b)
      if (k == pat.text) return v == e;
    b.emplace_back(pat.text, e);
    return true;
  }
  if (pat.kind != e.kind || pat.text != e.text || pat.children.size() != e.children.size()) return false;
  if (pat.kind == Expr::Kind::Literal && pat.literal != e.literal) return false;
  for (std::size_t i = 0; i < pat.children.size(); ++i)
    if (!match(pat.children[i], e.children[i], b)) return false;
  return true;
}

Expr instantiate(const Expr& pat, const Bindings& b) {
  if (pat.kind == Expr::Kind::Name && !pat.text.empty() && pat.text[0] == '$') {
    for (const auto& [k, v] : b)
      if (k == pat.text) return v;
    throw DataError("api substitution uses unbound " + pat.text);
  }
  Expr out = pat;
  for (auto& c : out.children) c = instantiate(c, b);
  return out;
}

std::vector<Draft> api_substitution(const MethodUnit& m, const std::vector<ApiSubstitution>& table) {
  std::vector<std::pair<Expr, Expr>> rules;
  for (const auto& t : table) rules.emplace_back(parse_expression(t.from), parse_expression(t.to));
  std::vector<Draft> out;
  for (const auto& p : preorder_paths(m)) {
    std::size_t count = 0;
    shell_nodes(statement_at(m, p), [&](const Expr&) { ++count; });
    for (std::size_t k = 0; k < count; ++k) {
      for (const auto& [from, to] : rules) {
        Draft d{p, {p}, m};
        std::size_t at = 0;
        bool done = false;
        // Replacement happens after the walk moves on, so the walk never
        // descends into the new subtree.
        std::function<void(Expr&)> go = [&](Expr& e) {
          if (done) return;
          if (at++ == k) {
            Bindings b;
            if (match(from, e, b)) {
              e = instantiate(to, b);
              done = true;
            }
            return;
          }
          for (auto& c : e.children) go(c);
        };
        shell_exprs(statement_at(d.method, p), [&](Expr& root) { go(root); });
        if (done) out.push_back(std::move(d));
      }
    }
  }
  return out;
}

bool reorderable(const Stmt& s) { return s.kind == Stmt::Kind::LocalVar || s.kind == Stmt::Kind::ExprStmt; }

std::vector<Draft> statements_reordering(const MethodUnit& m) {
  std::vector<Draft> out;
  auto visit_block = [&](const std::vector<Stmt>& blk, const StatementPath& owner, std::uint32_t b) {
    for (std::size_t i = 0; i + 1 < blk.size(); ++i) {
      const Stmt& x = blk[i];
      const Stmt& y = blk[i + 1];
      if (!reorderable(x) || !reorderable(y) || x == y) continue;
      Access ax = shell_access(x), ay = shell_access(y);
      if (!disjoint(ax.writes, ay.reads) || !disjoint(ax.writes, ay.writes) || !disjoint(ay.writes, ax.reads)) continue;
      if (!disjoint(ax.receivers, ay.receivers)) continue;
      StatementPath px = owner.empty() ? StatementPath{{0, static_cast<std::uint32_t>(i)}} : child(owner, b, i);
      StatementPath py = owner.empty() ? StatementPath{{0, static_cast<std::uint32_t>(i + 1)}} : child(owner, b, i + 1);
      Draft d{px, {px, py}, m};
      auto& target = parent_block(d.method, px);
      std::swap(target[i], target[i + 1]);
      out.push_back(std::move(d));
    }
  };
  visit_block(m.body, {}, 0);
  for (const auto& p : preorder_paths(m)) {
    const Stmt& s = statement_at(m, p);
    for (std::size_t b = 0; b < block_count(s); ++b) visit_block(block(s, b), p, static_cast<std::uint32_t>(b));
  }
  return out;
}

}  // namespace

namespace {

// ---- baseline transformations -------------------------------------------------

void splice(MethodUnit& m, const StatementPath& p, std::vector<Stmt> with) {
  auto& blk = parent_block(m, p);
  auto at = blk.begin() + p.back().index;
  at = blk.erase(at);
  blk.insert(at, std::make_move_iterator(with.begin()), std::make_move_iterator(with.end()));
}

// Local declarations at the top level of a block.
std::vector<std::string> top_level_locals(const std::vector<Stmt>& blk) {
  std::vector<std::string> out;
  for (const auto& s : blk)
    if (s.kind == Stmt::Kind::LocalVar) out.push_back(s.name);
  return out;
}

// Moving a block's statements into the enclosing block must not collide with
// other declarations of the same names.
bool safe_to_inline(const MethodUnit& m, const std::vector<Stmt>& blk) {
  for (const auto& n : top_level_locals(blk))
    if (declarations_of(m, n) != 1) return false;
  return true;
}

// Occurrences of a name anywhere in the method, declarations included.
std::size_t mentions(const MethodUnit& m, const std::string& x) {
  std::size_t n = 0;
  for (const auto& prm : m.header.params) n += prm.name == x;
  deep_statements(m.body, [&](const Stmt& s) {
    n += s.kind == Stmt::Kind::LocalVar && s.name == x;
    for (const auto& i : s.init) n += i.kind == Stmt::Kind::LocalVar && i.name == x;
    for (const auto& c : s.catches) n += c.name == x;
    shell_nodes(s, [&](const Expr& e) { n += is_name(e, x); });
  });
  return n;
}

bool is_assign_of(const Stmt& s, const std::string& x, const char* literal) {
  return s.kind == Stmt::Kind::ExprStmt && s.expr->kind == Expr::Kind::Assign && s.expr->text == "=" &&
         is_name(s.expr->children[0], x) && s.expr->children[1].kind == Expr::Kind::Literal &&
         s.expr->children[1].text == literal;
}

// boolean f = true; ... while (f) { ...; if (c) { ...; f = false; } }
std::vector<Draft> control_flag_removal(const MethodUnit& m) {
  std::vector<Draft> out;
  for (const auto& p : preorder_paths(m)) {
    const Stmt& decl = statement_at(m, p);
    if (decl.kind != Stmt::Kind::LocalVar || decl.type != "boolean" || !literal_bool(decl.expr, true)) continue;
    const std::string& f = decl.name;
    if (declarations_of(m, f) != 1) continue;
    const auto& blk = parent_block(const_cast<MethodUnit&>(m), p);
    for (std::size_t j = p.back().index + 1; j < blk.size(); ++j) {
      const Stmt& loop = blk[j];
      if (loop.kind != Stmt::Kind::While || !is_name(*loop.expr, f) || loop.body.empty()) continue;
      const Stmt& last = loop.body.back();
      if (last.kind != Stmt::Kind::If || last.has_else || last.body.empty() || !is_assign_of(last.body.back(), f, "false"))
        continue;
      // decl, condition and the reset are the only occurrences.
      if (mentions(m, f) != 3) break;
      StatementPath lp = p;
      lp.back().index = static_cast<std::uint32_t>(j);
      StatementPath ip = child(lp, 0, static_cast<std::uint32_t>(loop.body.size() - 1));
      StatementPath ap = child(ip, 0, static_cast<std::uint32_t>(last.body.size() - 1));
      Draft d{p, {p, lp, ap}, m};
      Stmt brk;
      brk.kind = Stmt::Kind::Break;
      statement_at(d.method, ap) = brk;
      statement_at(d.method, lp).expr = Expr::lit(LiteralKind::Bool, "true");
      parent_block(d.method, p).erase(parent_block(d.method, p).begin() + p.back().index);
      out.push_back(std::move(d));
      break;
    }
  }
  return out;
}

// if (a) { if (b) { S } } becomes if (a && b) { S }.
std::vector<Draft> nested_condition_simplification(const MethodUnit& m) {
  std::vector<Draft> out;
  for (const auto& p : preorder_paths(m)) {
    const Stmt& s = statement_at(m, p);
    if (s.kind != Stmt::Kind::If || s.has_else || s.body.size() != 1) continue;
    const Stmt& inner = s.body[0];
    if (inner.kind != Stmt::Kind::If || inner.has_else) continue;
    Draft d{p, {p, child(p, 0, 0)}, m};
    Stmt& t = statement_at(d.method, p);
    Stmt in = t.body[0];
    t.expr = Expr::binary("&&", *t.expr, *in.expr);
    t.body = std::move(in.body);
    out.push_back(std::move(d));
  }
  return out;
}

// A loop-invariant local moves in front of its loop.
std::vector<Draft> hoisting(const MethodUnit& m) {
  std::vector<Draft> out;
  for (const auto& p : preorder_paths(m)) {
    const Stmt& loop = statement_at(m, p);
    if (loop.kind != Stmt::Kind::While && loop.kind != Stmt::Kind::For) continue;
    Access inside = deep_access(loop.body);
    Access head = shell_access(loop);
    for (std::size_t k = 0; k < loop.body.size(); ++k) {
      const Stmt& s = loop.body[k];
      if (s.kind != Stmt::Kind::LocalVar || !s.expr || !pure_total(*s.expr)) continue;
      if (declarations_of(m, s.name) != 1) continue;
      Access init;
      access_expr(*s.expr, init);
      if (!disjoint(init.reads, inside.writes) || !disjoint(init.reads, head.writes)) continue;
      // The local itself is written only by its declaration.
      Access rest = deep_access(std::vector<Stmt>(loop.body.begin() + k + 1, loop.body.end()));
      if (rest.writes.count(s.name) || head.writes.count(s.name)) continue;
      Access before = deep_access(std::vector<Stmt>(loop.body.begin(), loop.body.begin() + k));
      if (before.reads.count(s.name) || head.reads.count(s.name)) continue;
      StatementPath sp = child(p, 0, static_cast<std::uint32_t>(k));
      Draft d{sp, {sp}, m};
      Stmt moved = statement_at(d.method, sp);
      auto& body = statement_at(d.method, p).body;
      body.erase(body.begin() + k);
      auto& blk = parent_block(d.method, p);
      blk.insert(blk.begin() + p.back().index, std::move(moved));
      out.push_back(std::move(d));
    }
  }
  return out;
}

bool terminates(const Stmt& s) {
  return s.kind == Stmt::Kind::Return || s.kind == Stmt::Kind::Throw || s.kind == Stmt::Kind::Break ||
         s.kind == Stmt::Kind::Continue;
}

std::vector<Draft> dead_code_elimination(const MethodUnit& m) {
  std::vector<Draft> out;
  for (const auto& p : preorder_paths(m)) {
    const Stmt& s = statement_at(m, p);
    if (s.kind == Stmt::Kind::If && (literal_bool(s.expr, false) || literal_bool(s.expr, true))) {
      bool taken = literal_bool(s.expr, true);
      const auto& kept = taken ? s.body : s.else_body;
      if (!safe_to_inline(m, kept)) continue;
      Draft d{p, {p}, m};
      splice(d.method, p, kept);
      out.push_back(std::move(d));
    } else if (s.kind == Stmt::Kind::While && literal_bool(s.expr, false)) {
      Draft d{p, {p}, m};
      splice(d.method, p, {});
      out.push_back(std::move(d));
    } else if (s.kind == Stmt::Kind::LocalVar && (!s.expr || pure_total(*s.expr)) && mentions(m, s.name) == 1) {
      Draft d{p, {p}, m};
      splice(d.method, p, {});
      out.push_back(std::move(d));
    }
  }
  // Unreachable tails after return, throw, break or continue.
  auto tails = [&](const std::vector<Stmt>& blk, const StatementPath& owner, std::uint32_t b) {
    for (std::size_t i = 0; i + 1 < blk.size(); ++i) {
      if (!terminates(blk[i])) continue;
      auto path_of = [&](std::size_t k) {
        return owner.empty() ? StatementPath{{0, static_cast<std::uint32_t>(k)}}
                             : child(owner, b, static_cast<std::uint32_t>(k));
      };
      Draft d{path_of(i + 1), {}, m};
      for (std::size_t k = i + 1; k < blk.size(); ++k) d.touched.insert(path_of(k));
      auto& target = parent_block(d.method, path_of(i));
      target.erase(target.begin() + i + 1, target.end());
      out.push_back(std::move(d));
      break;
    }
  };
  tails(m.body, {}, 0);
  for (const auto& p : preorder_paths(m)) {
    const Stmt& s = statement_at(m, p);
    for (std::size_t b = 0; b < block_count(s); ++b) tails(block(s, b), p, static_cast<std::uint32_t>(b));
  }
  return out;
}

// for <-> while.
std::vector<Draft> control_statement_unification(const MethodUnit& m) {
  std::vector<Draft> out;
  for (const auto& p : preorder_paths(m)) {
    const Stmt& s = statement_at(m, p);
    if (s.kind == Stmt::Kind::For) {
      if (deep_has(s.body, Stmt::Kind::Continue)) continue;
      if (!s.init.empty() && s.init[0].kind == Stmt::Kind::LocalVar && declarations_of(m, s.init[0].name) != 1) continue;
      Stmt loop;
      loop.kind = Stmt::Kind::While;
      loop.expr = s.expr ? *s.expr : Expr::lit(LiteralKind::Bool, "true");
      loop.body = s.body;
      for (const auto& u : s.update) loop.body.push_back(Stmt::expression(u));
      std::vector<Stmt> with = s.init;
      with.push_back(std::move(loop));
      Draft d{p, {p}, m};
      splice(d.method, p, std::move(with));
      out.push_back(std::move(d));
    } else if (s.kind == Stmt::Kind::While) {
      Draft d{p, {p}, m};
      statement_at(d.method, p).kind = Stmt::Kind::For;
      out.push_back(std::move(d));
    }
  }
  return out;
}

// Statements after `decl` in its block, and everything nested in them.
bool in_scope_after(const StatementPath& decl, const StatementPath& q) {
  if (q.size() < decl.size()) return false;
  for (std::size_t k = 0; k + 1 < decl.size(); ++k)
    if (q[k] != decl[k]) return false;
  const auto& at = q[decl.size() - 1];
  return at.block == decl.back().block && at.index > decl.back().index;
}

// Locals initialised with a constant and never written again.
std::vector<Draft> constant_propagation(const MethodUnit& m) {
  std::vector<Draft> out;
  for (const auto& p : preorder_paths(m)) {
    const Stmt& s = statement_at(m, p);
    if (s.kind != Stmt::Kind::LocalVar || !s.expr || !is_constant(*s.expr)) continue;
    if (declarations_of(m, s.name) != 1) continue;
    // Writes other than the declaration itself.
    bool written = false;
    deep_statements(m.body, [&](const Stmt& t) {
      Access a;
      shell_exprs(t, [&](const Expr& e) { access_expr(e, a); });
      written |= a.writes.count(s.name) > 0;
      for (const auto& i : t.init) written |= i.kind == Stmt::Kind::LocalVar && i.name == s.name;
    });
    if (written) continue;
    Draft d{p, {}, m};
    for (const auto& q : preorder_paths(m)) {
      if (!in_scope_after(p, q)) continue;
      const Stmt& t = statement_at(m, q);
      bool uses = false;
      shell_exprs(t, [&](const Expr& e) { uses |= uses_name(e, s.name); });
      if (!uses) continue;
      d.touched.insert(q);
      Stmt& target = statement_at(d.method, q);
      shell_exprs(target, [&](Expr& e) { rename_uses(e, s.name, [&] { return *s.expr; }); });
    }
    if (d.touched.empty()) continue;
    out.push_back(std::move(d));
  }
  return out;
}

// for (int i = A; i < B; i++) with constant bounds becomes straight-line copies.
std::vector<Draft> loop_unrolling(const MethodUnit& m, std::size_t max_unroll) {
  std::vector<Draft> out;
  for (const auto& p : preorder_paths(m)) {
    const Stmt& s = statement_at(m, p);
    if (s.kind != Stmt::Kind::For || s.init.size() != 1 || s.init[0].kind != Stmt::Kind::LocalVar ||
        s.init[0].type != "int" || !s.init[0].expr || !s.expr || s.update.size() != 1)
      continue;
    const std::string& i = s.init[0].name;
    auto start = int_constant(*s.init[0].expr);
    const Expr& cond = *s.expr;
    if (!start || cond.kind != Expr::Kind::Binary || (cond.text != "<" && cond.text != "<=") ||
        !is_name(cond.children[0], i))
      continue;
    auto bound = int_constant(cond.children[1]);
    if (!bound) continue;
    const Expr& u = s.update[0];
    std::int64_t step = 0;
    if ((u.kind == Expr::Kind::Postfix || u.kind == Expr::Kind::Unary) && u.text == "++" && is_name(u.children[0], i))
      step = 1;
    else if (u.kind == Expr::Kind::Assign && u.text == "+=" && is_name(u.children[0], i))
      step = int_constant(u.children[1]).value_or(0);
    if (step <= 0) continue;
    if (deep_has(s.body, Stmt::Kind::Break) || deep_has(s.body, Stmt::Kind::Continue)) continue;
    if (!top_level_locals(s.body).empty() || deep_access(s.body).writes.count(i)) continue;
    std::vector<std::int64_t> values;
    for (std::int64_t v = *start; cond.text == "<" ? v < *bound : v <= *bound; v += step) {
      values.push_back(v);
      if (values.size() > max_unroll) break;
    }
    if (values.size() > max_unroll) continue;
    std::vector<Stmt> copies;
    for (std::int64_t v : values) {
      for (Stmt c : s.body) {
        std::function<void(Stmt&)> subst = [&](Stmt& t) {
          shell_exprs(t, [&](Expr& e) { rename_uses(e, i, [&] { return int_expr(v); }); });
          for (std::size_t b = 0; b < block_count(t); ++b)
            for (auto& x : block(t, b)) subst(x);
        };
        subst(c);
        copies.push_back(std::move(c));
      }
    }
    Draft d{p, {p}, m};
    splice(d.method, p, std::move(copies));
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

const std::vector<ApiSubstitution>& builtin_api_substitutions() {
  static const std::vector<ApiSubstitution> table = [] {
    std::vector<ApiSubstitution> t{
        {"$x.indexOf($y) != -1", "$x.contains($y)"},
        {"$x.indexOf($y) >= 0", "$x.contains($y)"},
        {"$x.contains($y)", "$x.indexOf($y) != -1"},
        {"$x.size() == 0", "$x.isEmpty()"},
        {"$x.isEmpty()", "$x.size() == 0"},
        {"$x.length() == 0", "$x.isEmpty()"},
    };
    return t;
  }();
  return table;
}

std::vector<ApiSubstitution> load_api_substitutions(const std::string& path) {
  std::vector<ApiSubstitution> table = builtin_api_substitutions();
  if (path.empty()) return table;
  std::ifstream in(path);
  if (!in) throw DataError("cannot read api substitution table " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("api substitution table " + path + " is not JSON: " + e.what());
  }
  if (!j.is_array()) throw DataError("api substitution table must be an array");
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e["from"].is_string() || !e["to"].is_string())
      throw DataError("api substitution entries need string 'from' and 'to'");
    ApiSubstitution s{e["from"].get<std::string>(), e["to"].get<std::string>()};
    try {
      parse_expression(s.from);
      parse_expression(s.to);
    } catch (const SyntaxError& err) {
      throw DataError("api substitution does not parse: " + std::string(err.what()));
    }
    bool known = std::any_of(table.begin(), table.end(),
                             [&](const ApiSubstitution& t) { return t.from == s.from && t.to == s.to; });
    if (!known) table.push_back(std::move(s));
  }
  return table;
}

nlohmann::json to_json(const Rewrite& r) {
  nlohmann::json touched = nlohmann::json::array();
  for (const auto& p : r.touched) touched.push_back(to_string(p));
  return {{"transformation", r.transformation},
          {"site", to_string(r.site)},
          {"touched", touched},
          {"distance", r.distance},
          {"source", pretty(r.method)}};
}

std::vector<Rewrite> rewrites(const MethodUnit& method, const std::string& transformation,
                              const TransformOptions& options) {
  std::vector<Draft> drafts;
  if (transformation == "variable-renaming") drafts = variable_renaming(method);
  else if (transformation == "operands-swapping") drafts = operands_swapping(method);
  else if (transformation == "api-substitution") drafts = api_substitution(method, options.api_table);
  else if (transformation == "statements-reordering") drafts = statements_reordering(method);
  else if (transformation == "control-flag-removal") drafts = control_flag_removal(method);
  else if (transformation == "nested-condition-simplification") drafts = nested_condition_simplification(method);
  else if (transformation == "hoisting") drafts = hoisting(method);
  else if (transformation == "dead-code-elimination") drafts = dead_code_elimination(method);
  else if (transformation == "control-statement-unification") drafts = control_statement_unification(method);
  else if (transformation == "constant-propagation") drafts = constant_propagation(method);
  else if (transformation == "loop-unrolling") drafts = loop_unrolling(method, options.max_unroll);
  else throw DataError("unknown transformation '" + transformation + "'");

  std::vector<Rewrite> out;
  std::set<std::string> seen;
  for (auto& d : drafts) {
    if (d.method == method) continue;
    if (options.only && !std::includes(options.only->begin(), options.only->end(), d.touched.begin(), d.touched.end()))
      continue;
    // The result must still be a method the parser accepts.
    std::string src = pretty(d.method);
    try {
      if (!(parse_method(src) == d.method)) continue;
    } catch (const SyntaxError&) {
      continue;
    }
    if (!seen.insert(src).second) continue;
    Rewrite r;
    r.transformation = transformation;
    r.site = d.site;
    r.touched = std::move(d.touched);
    r.distance = method_distance(method, d.method);
    r.method = std::move(d.method);
    out.push_back(std::move(r));
  }
  return out;
}

Rewrite apply_transformation(const MethodUnit& method, const std::string& transformation, std::size_t index,
                             const TransformOptions& options) {
  auto all = rewrites(method, transformation, options);
  if (index >= all.size())
    throw NotApplicable(transformation + " has " + std::to_string(all.size()) + " applicable sites, asked for " +
                        std::to_string(index));
  return std::move(all[index]);
}

}  // namespace patic
