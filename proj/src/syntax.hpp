#pragma once

// Operator tables shared by the parser, the printer and the grammar tracer.

#include <string_view>

#include "patic/ast.hpp"

namespace patic::syntax {

inline int binary_precedence(std::string_view op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "|") return 3;
  if (op == "^") return 4;
  if (op == "&") return 5;
  if (op == "==" || op == "!=") return 6;
  if (op == "<" || op == ">" || op == "<=" || op == ">=") return 7;
  if (op == "<<" || op == ">>" || op == ">>>") return 8;
  if (op == "+" || op == "-") return 9;
  if (op == "*" || op == "/" || op == "%") return 10;
  return 0;
}

inline bool is_assign_op(std::string_view op) {
  return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=" ||
         op == "&=" || op == "|=" || op == "^=" || op == "<<=" || op == ">>=" || op == ">>>=";
}

inline constexpr int kUnaryPrecedence = 11;
inline constexpr int kPostfixPrecedence = 12;

inline int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Assign: return 0;
    case Expr::Kind::Binary: return binary_precedence(e.text);
    case Expr::Kind::Unary: return kUnaryPrecedence;
    default: return kPostfixPrecedence;
  }
}

}  // namespace patic::syntax
