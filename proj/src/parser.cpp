#include <algorithm>
#include <array>

#include "patic/ast.hpp"
#include "patic/errors.hpp"
#include "syntax.hpp"

namespace patic {

namespace {

constexpr std::array<std::string_view, 8> kPrimitives = {"boolean", "byte", "short", "int",
                                                         "long",    "char", "float", "double"};

bool is_primitive(std::string_view s) {
  return std::find(kPrimitives.begin(), kPrimitives.end(), s) != kPrimitives.end();
}

using syntax::binary_precedence;
using syntax::is_assign_op;

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  MethodUnit method() {
    MethodUnit m;
    skip_annotations();
    while (cur().kind == Token::Kind::Keyword &&
           (is("public") || is("protected") || is("private") || is("static") || is("final") ||
            is("synchronized") || is("abstract"))) {
      if (std::find(m.header.modifiers.begin(), m.header.modifiers.end(), cur().text) ==
          m.header.modifiers.end())
        m.header.modifiers.push_back(cur().text);
      advance();
      skip_annotations();
    }
    if (is("void")) {
      m.header.result_type = "void";
      advance();
    } else {
      m.header.result_type = type();
    }
    m.header.name = ident();
    expect("(");
    if (!is(")")) {
      do {
        if (is("final")) advance();
        Param p;
        p.type = type();
        p.name = ident();
        for (const auto& q : m.header.params) {
          if (q.name == p.name) fail("duplicate parameter '" + p.name + "'");
        }
        m.header.params.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    if (accept("throws")) {
      do {
        m.header.throws.push_back(type());
      } while (accept(","));
    }
    m.body = braced_block();
    if (cur().kind != Token::Kind::End) fail("trailing input after method");
    return m;
  }

  Expr whole_expression() {
    Expr e = expression();
    if (cur().kind != Token::Kind::End) fail("trailing input after expression");
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int gt_consumed_ = 0;

  struct Mark {
    std::size_t pos;
    int gt;
  };
  Mark mark() const { return {pos_, gt_consumed_}; }
  void reset(Mark m) {
    pos_ = m.pos;
    gt_consumed_ = m.gt;
  }

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t k = 1) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is(std::string_view t) const {
    return gt_consumed_ == 0 && (cur().kind == Token::Kind::Punct || cur().kind == Token::Kind::Keyword) &&
           cur().text == t;
  }
  void advance() {
    if (cur().kind != Token::Kind::End) ++pos_;
    gt_consumed_ = 0;
  }
  bool accept(std::string_view t) {
    if (is(t)) {
      advance();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg + (cur().kind == Token::Kind::End ? " (at end of input)" : " near '" + cur().text + "'"),
                      cur().line, cur().column);
  }
  void expect(std::string_view t) {
    if (!accept(t)) fail("expected '" + std::string(t) + "'");
  }
  std::string ident() {
    if (cur().kind != Token::Kind::Ident || gt_consumed_ != 0) fail("expected identifier");
    std::string s = cur().text;
    advance();
    return s;
  }

  void skip_annotations() {
    while (is("@") && peek().kind == Token::Kind::Ident) {
      advance();
      advance();
      while (is(".") && peek().kind == Token::Kind::Ident) {
        advance();
        advance();
      }
      if (is("(")) {
        int depth = 0;
        do {
          if (is("(")) ++depth;
          if (is(")")) --depth;
          if (cur().kind == Token::Kind::End) fail("unterminated annotation");
          advance();
        } while (depth > 0);
      }
    }
  }

  void expect_gt() {
    const std::string& t = cur().text;
    if (cur().kind != Token::Kind::Punct || t.empty() || t.find_first_not_of('>') != std::string::npos)
      fail("expected '>'");
    ++gt_consumed_;
    if (gt_consumed_ == static_cast<int>(t.size())) advance();
  }

  std::string type() {
    std::string t;
    if (cur().kind == Token::Kind::Keyword && is_primitive(cur().text)) {
      t = cur().text;
      advance();
    } else {
      t = ident();
      while (is(".") && peek().kind == Token::Kind::Ident) {
        advance();
        t += "." + ident();
      }
      if (is("<")) {
        advance();
        t += "<";
        bool first = true;
        while (true) {
          if (!first) t += ", ";
          first = false;
          if (accept("?")) {
            t += "?";
          } else {
            t += type();
          }
          if (!accept(",")) break;
        }
        expect_gt();
        t += ">";
      }
    }
    while (is("[") && peek().kind == Token::Kind::Punct && peek().text == "]") {
      advance();
      advance();
      t += "[]";
    }
    return t;
  }

  std::vector<Stmt> braced_block() {
    expect("{");
    std::vector<Stmt> out;
    while (!is("}")) {
      if (cur().kind == Token::Kind::End) fail("expected '}'");
      statement_into(out);
    }
    expect("}");
    return out;
  }

  std::vector<Stmt> body_of_control() {
    if (is("{")) return braced_block();
    std::vector<Stmt> out;
    statement_into(out);
    return out;
  }

  // Tries "Type name (= init)? (, name (= init)?)* ;". Restores on failure.
  bool try_local_decl(std::vector<Stmt>& out, bool require_semicolon = true) {
    Mark m = mark();
    try {
      if (is("final")) advance();
      std::string t = type();
      if (cur().kind != Token::Kind::Ident || gt_consumed_ != 0) {
        reset(m);
        return false;
      }
      const Token& after = peek();
      if (!(after.kind == Token::Kind::Punct && (after.text == "=" || after.text == ";" || after.text == ","))) {
        reset(m);
        return false;
      }
    } catch (const SyntaxError&) {
      reset(m);
      return false;
    }
    reset(m);
    if (is("final")) advance();
    std::string t = type();
    do {
      std::string n = ident();
      std::optional<Expr> init;
      if (accept("=")) init = expression();
      out.push_back(Stmt::local(t, std::move(n), std::move(init)));
    } while (require_semicolon && accept(","));
    if (require_semicolon) expect(";");
    return true;
  }

  void statement_into(std::vector<Stmt>& out) {
    if (accept(";")) {
      out.push_back(Stmt::empty());
      return;
    }
    if (is("{")) fail("nested blocks are not supported");
    if (accept("if")) {
      Stmt s;
      s.kind = Stmt::Kind::If;
      expect("(");
      s.expr = expression();
      expect(")");
      s.body = body_of_control();
      if (accept("else")) {
        s.has_else = true;
        s.else_body = body_of_control();
      }
      out.push_back(std::move(s));
      return;
    }
    if (accept("while")) {
      Stmt s;
      s.kind = Stmt::Kind::While;
      expect("(");
      s.expr = expression();
      expect(")");
      s.body = body_of_control();
      out.push_back(std::move(s));
      return;
    }
    if (accept("for")) {
      Stmt s;
      s.kind = Stmt::Kind::For;
      expect("(");
      if (!is(";")) {
        if (!try_local_decl(s.init, false)) s.init.push_back(Stmt::expression(expression()));
        if (is(":")) fail("enhanced for loops are not supported");
      }
      expect(";");
      if (!is(";")) s.expr = expression();
      expect(";");
      if (!is(")")) {
        do {
          s.update.push_back(expression());
        } while (accept(","));
      }
      expect(")");
      s.body = body_of_control();
      out.push_back(std::move(s));
      return;
    }
    if (accept("try")) {
      Stmt s;
      s.kind = Stmt::Kind::Try;
      if (is("(")) fail("try-with-resources is not supported");
      s.body = braced_block();
      while (accept("catch")) {
        CatchClause c;
        expect("(");
        if (is("final")) advance();
        c.type = type();
        if (is("|")) fail("multi-catch is not supported");
        c.name = ident();
        expect(")");
        c.body = braced_block();
        s.catches.push_back(std::move(c));
      }
      if (accept("finally")) {
        s.has_finally = true;
        s.finally_body = braced_block();
      }
      if (s.catches.empty() && !s.has_finally) fail("try without catch or finally");
      out.push_back(std::move(s));
      return;
    }
    if (accept("return")) {
      Stmt s = Stmt::ret();
      if (!is(";")) s.expr = expression();
      expect(";");
      out.push_back(std::move(s));
      return;
    }
    if (accept("break")) {
      expect(";");
      Stmt s;
      s.kind = Stmt::Kind::Break;
      out.push_back(std::move(s));
      return;
    }
    if (accept("continue")) {
      expect(";");
      Stmt s;
      s.kind = Stmt::Kind::Continue;
      out.push_back(std::move(s));
      return;
    }
    if (accept("throw")) {
      Stmt s;
      s.kind = Stmt::Kind::Throw;
      s.expr = expression();
      expect(";");
      out.push_back(std::move(s));
      return;
    }
    if (try_local_decl(out)) return;
    Expr e = expression();
    expect(";");
    out.push_back(Stmt::expression(std::move(e)));
  }

  Expr expression() {
    Expr lhs = binary(1);
    if ((cur().kind == Token::Kind::Punct) && gt_consumed_ == 0 && is_assign_op(cur().text)) {
      std::string op = cur().text;
      advance();
      Expr rhs = expression();
      return Expr::assign(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr binary(int min_prec) {
    Expr lhs = unary();
    while (cur().kind == Token::Kind::Punct && gt_consumed_ == 0) {
      int p = binary_precedence(cur().text);
      if (p == 0 || p < min_prec) break;
      std::string op = cur().text;
      advance();
      Expr rhs = binary(p + 1);
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr unary() {
    if (cur().kind == Token::Kind::Punct &&
        (is("+") || is("-") || is("!") || is("~") || is("++") || is("--"))) {
      std::string op = cur().text;
      advance();
      return Expr::unary(op, unary());
    }
    return postfix(primary());
  }

  Expr postfix(Expr e) {
    while (true) {
      if (accept(".")) {
        e = Expr::field(std::move(e), ident());
      } else if (accept("(")) {
        std::vector<Expr> args;
        if (!is(")")) {
          do {
            args.push_back(expression());
          } while (accept(","));
        }
        expect(")");
        e = Expr::call(std::move(e), std::move(args));
      } else if (accept("[")) {
        Expr idx = expression();
        expect("]");
        e = Expr::index(std::move(e), std::move(idx));
      } else if (is("++") || is("--")) {
        std::string op = cur().text;
        advance();
        e = Expr::postfix(op, std::move(e));
      } else {
        return e;
      }
    }
  }

  Expr primary() {
    const Token& t = cur();
    if (t.kind == Token::Kind::Literal) {
      Expr e = Expr::lit(t.literal, t.text);
      advance();
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      Expr e = Expr::name(t.text);
      advance();
      return e;
    }
    if (is("this") || is("super")) {
      Expr e = Expr::name(t.text);
      advance();
      return e;
    }
    if (accept("(")) {
      Expr e = expression();
      expect(")");
      return e;
    }
    if (accept("new")) {
      std::string ty;
      if (cur().kind == Token::Kind::Keyword && is_primitive(cur().text)) {
        ty = cur().text;
        advance();
      } else {
        ty = ident();
        while (is(".") && peek().kind == Token::Kind::Ident) {
          advance();
          ty += "." + ident();
        }
        if (is("<")) {
          advance();
          ty += "<";
          if (!is(">")) {
            bool first = true;
            do {
              if (!first) ty += ", ";
              first = false;
              ty += type();
            } while (accept(","));
          }
          expect_gt();
          ty += ">";
        }
      }
      if (accept("[")) {
        Expr dim = expression();
        expect("]");
        Expr e;
        e.kind = Expr::Kind::NewArray;
        e.text = ty;
        e.children.push_back(std::move(dim));
        return e;
      }
      expect("(");
      Expr e;
      e.kind = Expr::Kind::New;
      e.text = ty;
      if (!is(")")) {
        do {
          e.children.push_back(expression());
        } while (accept(","));
      }
      expect(")");
      return e;
    }
    fail("expected expression");
  }
};

}  // namespace

MethodUnit parse_method(std::string_view source) { return Parser(source).method(); }

Expr parse_expression(std::string_view source) { return Parser(source).whole_expression(); }

}  // namespace patic
