#include <sstream>

#include "patic/ast.hpp"
#include "syntax.hpp"

namespace patic {

namespace {

void print_expr(std::string& out, const Expr& e, int min_prec);

void print_child(std::string& out, const Expr& e, int min_prec) {
  if (syntax::precedence(e) < min_prec) {
    out += '(';
    print_expr(out, e, 0);
    out += ')';
  } else {
    print_expr(out, e, min_prec);
  }
}

void print_args(std::string& out, const std::vector<Expr>& args, std::size_t from) {
  out += '(';
  for (std::size_t i = from; i < args.size(); ++i) {
    if (i > from) out += ", ";
    print_child(out, args[i], 0);
  }
  out += ')';
}

void print_expr(std::string& out, const Expr& e, int) {
  switch (e.kind) {
    case Expr::Kind::Name:
    case Expr::Kind::Literal:
      out += e.text;
      break;
    case Expr::Kind::Field:
      print_child(out, e.children[0], syntax::kPostfixPrecedence);
      out += '.';
      out += e.text;
      break;
    case Expr::Kind::Call:
      print_child(out, e.children[0], syntax::kPostfixPrecedence);
      print_args(out, e.children, 1);
      break;
    case Expr::Kind::Index:
      print_child(out, e.children[0], syntax::kPostfixPrecedence);
      out += '[';
      print_child(out, e.children[1], 0);
      out += ']';
      break;
    case Expr::Kind::Binary: {
      int p = syntax::binary_precedence(e.text);
      print_child(out, e.children[0], p);
      out += ' ';
      out += e.text;
      out += ' ';
      print_child(out, e.children[1], p + 1);
      break;
    }
    case Expr::Kind::Unary: {
      out += e.text;
      std::string operand;
      print_child(operand, e.children[0], syntax::kUnaryPrecedence);
      // Keep "- -x" and "+ ++x" from fusing into a different token.
      if (!operand.empty() && (operand[0] == '-' || operand[0] == '+') && operand[0] == e.text.back())
        out += ' ';
      out += operand;
      break;
    }
    case Expr::Kind::Postfix:
      print_child(out, e.children[0], syntax::kPostfixPrecedence);
      out += e.text;
      break;
    case Expr::Kind::Assign:
      print_child(out, e.children[0], 1);
      out += ' ';
      out += e.text;
      out += ' ';
      print_child(out, e.children[1], 0);
      break;
    case Expr::Kind::New:
      out += "new ";
      out += e.text;
      print_args(out, e.children, 0);
      break;
    case Expr::Kind::NewArray:
      out += "new ";
      out += e.text;
      out += '[';
      print_child(out, e.children[0], 0);
      out += ']';
      break;
  }
}

void indent_to(std::string& out, int indent) { out.append(static_cast<std::size_t>(indent) * 4, ' '); }

void print_block(std::string& out, const std::vector<Stmt>& body, int indent);

void print_stmt(std::string& out, const Stmt& s, int indent);

// Prints the part of a for-header init without the trailing semicolon.
std::string for_init_text(const Stmt& s) {
  std::string out;
  if (s.kind == Stmt::Kind::LocalVar) {
    out = s.type + " " + s.name;
    if (s.expr) {
      out += " = ";
      print_child(out, *s.expr, 0);
    }
  } else if (s.expr) {
    print_child(out, *s.expr, 0);
  }
  return out;
}

void print_stmt(std::string& out, const Stmt& s, int indent) {
  indent_to(out, indent);
  switch (s.kind) {
    case Stmt::Kind::LocalVar:
      out += s.type + " " + s.name;
      if (s.expr) {
        out += " = ";
        print_child(out, *s.expr, 0);
      }
      out += ";\n";
      break;
    case Stmt::Kind::ExprStmt:
      print_child(out, *s.expr, 0);
      out += ";\n";
      break;
    case Stmt::Kind::Return:
      out += "return";
      if (s.expr) {
        out += ' ';
        print_child(out, *s.expr, 0);
      }
      out += ";\n";
      break;
    case Stmt::Kind::Throw:
      out += "throw ";
      print_child(out, *s.expr, 0);
      out += ";\n";
      break;
    case Stmt::Kind::Break:
      out += "break;\n";
      break;
    case Stmt::Kind::Continue:
      out += "continue;\n";
      break;
    case Stmt::Kind::Empty:
      out += ";\n";
      break;
    case Stmt::Kind::If: {
      const Stmt* cur = &s;
      while (true) {
        out += "if (";
        print_child(out, *cur->expr, 0);
        out += ") {\n";
        print_block(out, cur->body, indent + 1);
        indent_to(out, indent);
        out += "}";
        if (!cur->has_else) {
          out += "\n";
          break;
        }
        if (cur->else_body.size() == 1 && cur->else_body[0].kind == Stmt::Kind::If) {
          out += " else ";
          cur = &cur->else_body[0];
          continue;
        }
        out += " else {\n";
        print_block(out, cur->else_body, indent + 1);
        indent_to(out, indent);
        out += "}\n";
        break;
      }
      break;
    }
    case Stmt::Kind::While:
      out += "while (";
      print_child(out, *s.expr, 0);
      out += ") {\n";
      print_block(out, s.body, indent + 1);
      indent_to(out, indent);
      out += "}\n";
      break;
    case Stmt::Kind::For: {
      out += "for (";
      if (!s.init.empty()) out += for_init_text(s.init[0]);
      out += ';';
      if (s.expr) {
        out += ' ';
        print_child(out, *s.expr, 0);
      }
      out += ';';
      for (std::size_t i = 0; i < s.update.size(); ++i) {
        out += i == 0 ? " " : ", ";
        print_child(out, s.update[i], 0);
      }
      out += ") {\n";
      print_block(out, s.body, indent + 1);
      indent_to(out, indent);
      out += "}\n";
      break;
    }
    case Stmt::Kind::Try:
      out += "try {\n";
      print_block(out, s.body, indent + 1);
      indent_to(out, indent);
      out += "}";
      for (const auto& c : s.catches) {
        out += " catch (" + c.type + " " + c.name + ") {\n";
        print_block(out, c.body, indent + 1);
        indent_to(out, indent);
        out += "}";
      }
      if (s.has_finally) {
        out += " finally {\n";
        print_block(out, s.finally_body, indent + 1);
        indent_to(out, indent);
        out += "}";
      }
      out += "\n";
      break;
  }
}

void print_block(std::string& out, const std::vector<Stmt>& body, int indent) {
  for (const auto& s : body) print_stmt(out, s, indent);
}

}  // namespace

std::string pretty(const Expr& e) {
  std::string out;
  print_expr(out, e, 0);
  return out;
}

std::string pretty(const Stmt& s, int indent) {
  std::string out;
  print_stmt(out, s, indent);
  return out;
}

std::string pretty(const MethodUnit& m) {
  std::string out;
  for (const auto& mod : m.header.modifiers) out += mod + " ";
  out += m.header.result_type + " " + m.header.name + "(";
  for (std::size_t i = 0; i < m.header.params.size(); ++i) {
    if (i) out += ", ";
    out += m.header.params[i].type + " " + m.header.params[i].name;
  }
  out += ")";
  for (std::size_t i = 0; i < m.header.throws.size(); ++i) {
    out += i == 0 ? " throws " : ", ";
    out += m.header.throws[i];
  }
  out += " {\n";
  print_block(out, m.body, 1);
  out += "}\n";
  return out;
}

std::size_t body_token_count(const MethodUnit& m) {
  std::string text;
  print_block(text, m.body, 0);
  return token_texts(text).size();
}

}  // namespace patic
