#include <array>
#include <cctype>

#include "patic/ast.hpp"
#include "patic/errors.hpp"

namespace patic {

namespace {

constexpr std::array kReserved = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
    "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp",
    "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
    "volatile", "while", "true", "false", "null"};

// Longest first so that maximal munch works with a linear scan.
constexpr std::array kPuncts = {
    ">>>=", "<<=", ">>=", ">>>", "...", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
    "*=",   "/=",  "%=",  "&=",  "|=",  "^=", "<<", ">>", "->", "::", "(",  ")",  "{",  "}",  "[",
    "]",    ";",   ",",   ".",   "@",   "=",  ">",  "<",  "!",  "~",  "?",  ":",  "+",  "-",  "*",
    "/",    "&",   "|",   "^",   "%"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

}  // namespace

bool is_reserved_word(std::string_view word) {
  for (const char* r : kReserved) {
    if (word == r) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      int l0 = line, c0 = col;
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
      if (i + 1 >= src.size()) throw SyntaxError("unterminated comment", l0, c0);
      advance(2);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    std::size_t start = i;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      tok.text = std::string(src.substr(i, j - i));
      if (tok.text == "true" || tok.text == "false") {
        tok.kind = Token::Kind::Literal;
        tok.literal = LiteralKind::Bool;
      } else if (tok.text == "null") {
        tok.kind = Token::Kind::Literal;
        tok.literal = LiteralKind::Null;
      } else {
        tok.kind = is_reserved_word(tok.text) ? Token::Kind::Keyword : Token::Kind::Ident;
      }
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool floating = false;
      if (c == '0' && j + 1 < src.size() && (src[j + 1] == 'x' || src[j + 1] == 'X')) {
        j += 2;
        while (j < src.size() && (std::isxdigit(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      } else {
        while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
        if (j < src.size() && src[j] == '.' && j + 1 < src.size() &&
            std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
          floating = true;
          ++j;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        } else if (j < src.size() && src[j] == '.' &&
                   !(j + 1 < src.size() && ident_start(src[j + 1]))) {
          floating = true;
          ++j;
        }
        if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
          floating = true;
          ++j;
          if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      tok.kind = Token::Kind::Literal;
      tok.literal = floating ? LiteralKind::Double : LiteralKind::Int;
      if (j < src.size()) {
        char s = src[j];
        if (s == 'L' || s == 'l') {
          tok.literal = LiteralKind::Long;
          ++j;
        } else if (s == 'f' || s == 'F') {
          tok.literal = LiteralKind::Float;
          ++j;
        } else if (s == 'd' || s == 'D') {
          tok.literal = LiteralKind::Double;
          ++j;
        }
      }
      if (j < src.size() && ident_char(src[j])) throw SyntaxError("malformed number", line, col);
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != c) {
        if (src[j] == '\\') ++j;
        if (j < src.size() && src[j] == '\n') throw SyntaxError("newline in literal", line, col);
        ++j;
      }
      if (j >= src.size()) throw SyntaxError("unterminated literal", line, col);
      tok.kind = Token::Kind::Literal;
      tok.literal = c == '"' ? LiteralKind::String : LiteralKind::Char;
      tok.text = std::string(src.substr(i, j + 1 - i));
      advance(j + 1 - i);
    } else {
      bool matched = false;
      for (const char* p : kPuncts) {
        std::string_view pv(p);
        if (src.substr(i, pv.size()) == pv) {
          tok.kind = Token::Kind::Punct;
          tok.text = std::string(pv);
          advance(pv.size());
          matched = true;
          break;
        }
      }
      if (!matched) throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
    }
    (void)start;
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

std::vector<std::string> token_texts(std::string_view source) {
  std::vector<std::string> out;
  for (auto& t : tokenize(source)) {
    if (t.kind != Token::Kind::End) out.push_back(std::move(t.text));
  }
  return out;
}

}  // namespace patic
