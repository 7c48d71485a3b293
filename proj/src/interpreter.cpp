#include <cmath>
#include <map>
#include <random>

#include "patic/errors.hpp"
#include "patic/robustness.hpp"

namespace patic {

bool operator==(const Value& a, const Value& b) {
  if (a.v.index() != b.v.index()) return false;
  if (auto* x = std::get_if<std::shared_ptr<ArrayValue>>(&a.v)) {
    const auto& y = std::get<std::shared_ptr<ArrayValue>>(b.v);
    if (!*x || !y) return !*x && !y;
    return (*x)->items == y->items;
  }
  return a.v == b.v;
}

std::string to_string(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      return buf;
    }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const std::shared_ptr<ArrayValue>& a) const {
      if (!a) return "null";
      std::string out = "[";
      for (std::size_t i = 0; i < a->items.size(); ++i) out += (i ? "," : "") + to_string(a->items[i]);
      return out + "]";
    }
  };
  return std::visit(Visitor{}, v.v);
}

namespace {

// Thrown Java exception, by type name.
struct JavaThrow {
  std::string type;
  std::string detail;
};

struct StepLimit {};

enum class Flow { Normal, Break, Continue, Return };

std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

// Opaque values of unknown fields and calls: small, deterministic integers.
Value opaque(const std::string& key) { return Value{static_cast<std::int64_t>(fnv(key) % 1000)}; }

Value int_value(std::int64_t i) { return Value{i}; }

std::int64_t wrap(std::uint64_t u) { return static_cast<std::int64_t>(u); }

bool is_int(const Value& v) { return std::holds_alternative<std::int64_t>(v.v); }
bool is_double(const Value& v) { return std::holds_alternative<double>(v.v); }
bool is_num(const Value& v) { return is_int(v) || is_double(v); }
bool is_string(const Value& v) { return std::holds_alternative<std::string>(v.v); }
bool is_bool(const Value& v) { return std::holds_alternative<bool>(v.v); }

double as_double(const Value& v) { return is_int(v) ? static_cast<double>(std::get<std::int64_t>(v.v)) : std::get<double>(v.v); }

std::int64_t as_int(const Value& v) {
  if (!is_int(v)) throw JavaThrow{"ClassCastException", "expected an integer, got " + to_string(v)};
  return std::get<std::int64_t>(v.v);
}

bool as_bool(const Value& v) {
  if (!is_bool(v)) throw JavaThrow{"ClassCastException", "expected a boolean, got " + to_string(v)};
  return std::get<bool>(v.v);
}

Value default_for(const std::string& type) {
  if (type == "int" || type == "long" || type == "short" || type == "byte" || type == "char") return int_value(0);
  if (type == "double" || type == "float") return Value{0.0};
  if (type == "boolean") return Value{false};
  return Value{};
}

std::string unquote(const std::string& lexeme) {
  if (lexeme.size() < 2) return lexeme;
  std::string body = lexeme.substr(1, lexeme.size() - 2);
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size()) {
      char c = body[++i];
      out += c == 'n' ? '\n' : c == 't' ? '\t' : c == 'r' ? '\r' : c == '0' ? '\0' : c;
    } else {
      out += body[i];
    }
  }
  return out;
}

bool catches(const std::string& clause, const std::string& thrown) {
  return clause == thrown || clause == "Exception" || clause == "Throwable" ||
         (clause == "RuntimeException" && thrown != "Exception");
}

class Machine {
 public:
  Machine(std::size_t limit) : limit_(limit) {}

  Outcome run(const MethodUnit& m, const std::vector<Value>& args) {
    Outcome out;
    scopes_.emplace_back();
    for (std::size_t i = 0; i < m.header.params.size(); ++i)
      scopes_.back()[m.header.params[i].name] = i < args.size() ? args[i] : default_for(m.header.params[i].type);
    try {
      Flow f = exec_block(m.body, false);
      if (f == Flow::Return) out.returned = returned_;
    } catch (const JavaThrow& t) {
      out.exception = t.type + ": " + t.detail;
    } catch (const StepLimit&) {
      out.step_limit = true;
    }
    out.calls = std::move(calls_);
    return out;
  }

 private:
  std::size_t limit_;
  std::size_t steps_ = 0;
  std::vector<std::map<std::string, Value>> scopes_;
  std::map<std::string, Value> globals_;
  std::vector<std::string> calls_;
  Value returned_;
  std::size_t objects_ = 0;

  void tick() {
    if (++steps_ > limit_) throw StepLimit{};
  }

  Value* lookup(const std::string& n) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(n); f != it->end()) return &f->second;
    if (auto f = globals_.find(n); f != globals_.end()) return &f->second;
    return nullptr;
  }

  // ---- statements ----

  Flow exec_block(const std::vector<Stmt>& body, bool scoped = true) {
    if (scoped) scopes_.emplace_back();
    Flow f = Flow::Normal;
    try {
      for (const auto& s : body) {
        f = exec(s);
        if (f != Flow::Normal) break;
      }
    } catch (...) {
      if (scoped) scopes_.pop_back();
      throw;
    }
    if (scoped) scopes_.pop_back();
    return f;
  }

  Flow exec(const Stmt& s) {
    tick();
    switch (s.kind) {
      case Stmt::Kind::LocalVar:
        scopes_.back()[s.name] = s.expr ? eval(*s.expr) : default_for(s.type);
        return Flow::Normal;
      case Stmt::Kind::ExprStmt: eval(*s.expr); return Flow::Normal;
      case Stmt::Kind::Return:
        returned_ = s.expr ? eval(*s.expr) : Value{};
        return Flow::Return;
      case Stmt::Kind::Empty: return Flow::Normal;
      case Stmt::Kind::Break: return Flow::Break;
      case Stmt::Kind::Continue: return Flow::Continue;
      case Stmt::Kind::Throw: {
        Value v = eval(*s.expr);
        std::string type = s.expr->kind == Expr::Kind::New ? s.expr->text : "Exception";
        throw JavaThrow{type, to_string(v)};
      }
      case Stmt::Kind::If:
        if (as_bool(eval(*s.expr))) return exec_block(s.body);
        if (s.has_else) return exec_block(s.else_body);
        return Flow::Normal;
      case Stmt::Kind::While:
        while (as_bool(eval(*s.expr))) {
          tick();
          Flow f = exec_block(s.body);
          if (f == Flow::Break) break;
          if (f == Flow::Return) return f;
        }
        return Flow::Normal;
      case Stmt::Kind::For: {
        scopes_.emplace_back();
        Flow result = Flow::Normal;
        try {
          for (const auto& i : s.init) exec(i);
          while (!s.expr || as_bool(eval(*s.expr))) {
            tick();
            Flow f = exec_block(s.body);
            if (f == Flow::Break) break;
            if (f == Flow::Return) {
              result = f;
              break;
            }
            for (const auto& u : s.update) eval(u);
          }
        } catch (...) {
          scopes_.pop_back();
          throw;
        }
        scopes_.pop_back();
        return result;
      }
      case Stmt::Kind::Try: return exec_try(s);
    }
    return Flow::Normal;
  }

  Flow exec_try(const Stmt& s) {
    Flow f = Flow::Normal;
    std::optional<JavaThrow> pending;
    std::size_t depth = scopes_.size();
    try {
      f = exec_block(s.body);
    } catch (const JavaThrow& t) {
      scopes_.resize(depth);
      pending = t;
    }
    if (pending) {
      for (const auto& c : s.catches) {
        if (!catches(c.type, pending->type)) continue;
        JavaThrow caught = *pending;
        pending.reset();
        scopes_.emplace_back();
        scopes_.back()[c.name] = Value{caught.type + ": " + caught.detail};
        try {
          f = exec_block(c.body);
        } catch (const JavaThrow& t) {
          pending = t;
        }
        scopes_.resize(depth);
        break;
      }
    }
    if (s.has_finally) {
      Value saved = returned_;
      Flow g = exec_block(s.finally_body);
      if (g != Flow::Normal) return g;  // finally overrides
      returned_ = saved;
    }
    if (pending) throw *pending;
    return f;
  }

  // ---- expressions ----

  void store(const Expr& target, const Value& v) {
    switch (target.kind) {
      case Expr::Kind::Name:
        if (Value* slot = lookup(target.text)) *slot = v;
        else globals_[target.text] = v;
        return;
      case Expr::Kind::Index: {
        Value base = eval(target.children[0]);
        std::int64_t i = as_int(eval(target.children[1]));
        auto* arr = std::get_if<std::shared_ptr<ArrayValue>>(&base.v);
        if (!arr || !*arr) throw JavaThrow{"NullPointerException", "store into non-array"};
        if (i < 0 || static_cast<std::size_t>(i) >= (*arr)->items.size())
          throw JavaThrow{"ArrayIndexOutOfBoundsException", std::to_string(i)};
        (*arr)->items[static_cast<std::size_t>(i)] = v;
        return;
      }
      case Expr::Kind::Field: globals_[field_key(target)] = v; return;
      default: throw JavaThrow{"IllegalStateException", "bad assignment target"};
    }
  }

  std::string field_key(const Expr& f) {
    const Expr& base = f.children[0];
    std::string b = base.kind == Expr::Kind::Name && !lookup(base.text) ? base.text : to_string(eval(base));
    return b + "." + f.text;
  }

  Value eval(const Expr& e) {
    tick();
    switch (e.kind) {
      case Expr::Kind::Name:
        if (Value* slot = lookup(e.text)) return *slot;
        return opaque(e.text);
      case Expr::Kind::Literal: return literal(e);
      case Expr::Kind::Field: {
        const Expr& base = e.children[0];
        if (!(base.kind == Expr::Kind::Name && !lookup(base.text))) {
          Value b = eval(base);
          if (auto* arr = std::get_if<std::shared_ptr<ArrayValue>>(&b.v); arr && *arr && e.text == "length")
            return int_value(static_cast<std::int64_t>((*arr)->items.size()));
          if (std::holds_alternative<std::monostate>(b.v)) throw JavaThrow{"NullPointerException", "." + e.text};
        }
        std::string key = field_key(e);
        if (auto f = globals_.find(key); f != globals_.end()) return f->second;
        return opaque(key);
      }
      case Expr::Kind::Index: {
        Value base = eval(e.children[0]);
        std::int64_t i = as_int(eval(e.children[1]));
        auto* arr = std::get_if<std::shared_ptr<ArrayValue>>(&base.v);
        if (!arr || !*arr) {
          if (std::holds_alternative<std::monostate>(base.v)) throw JavaThrow{"NullPointerException", "index"};
          return opaque(to_string(base) + "[" + std::to_string(i) + "]");
        }
        if (i < 0 || static_cast<std::size_t>(i) >= (*arr)->items.size())
          throw JavaThrow{"ArrayIndexOutOfBoundsException", std::to_string(i)};
        return (*arr)->items[static_cast<std::size_t>(i)];
      }
      case Expr::Kind::Call: return call(e);
      case Expr::Kind::Binary: return binary(e);
      case Expr::Kind::Unary: return unary(e);
      case Expr::Kind::Postfix: {
        Value old = eval(e.children[0]);
        std::int64_t delta = e.text == "++" ? 1 : -1;
        if (is_double(old)) store(e.children[0], Value{as_double(old) + static_cast<double>(delta)});
        else store(e.children[0], int_value(wrap(static_cast<std::uint64_t>(as_int(old)) + static_cast<std::uint64_t>(delta))));
        return old;
      }
      case Expr::Kind::Assign: {
        Value v;
        if (e.text == "=") {
          v = eval(e.children[1]);
        } else {
          Value cur = eval(e.children[0]);
          Value rhs = eval(e.children[1]);
          v = arith(e.text.substr(0, e.text.size() - 1), cur, rhs);
          if (is_int(cur) && is_double(v)) v = int_value(static_cast<std::int64_t>(as_double(v)));
        }
        store(e.children[0], v);
        return v;
      }
      case Expr::Kind::New: {
        std::string text = "new " + e.text + "(";
        for (std::size_t i = 0; i < e.children.size(); ++i) text += (i ? "," : "") + to_string(eval(e.children[i]));
        return Value{text + ")#" + std::to_string(objects_++)};
      }
      case Expr::Kind::NewArray: {
        std::int64_t n = as_int(eval(e.children[0]));
        if (n < 0) throw JavaThrow{"NegativeArraySizeException", std::to_string(n)};
        if (n > 100000) throw JavaThrow{"OutOfMemoryError", std::to_string(n)};
        auto arr = std::make_shared<ArrayValue>();
        arr->items.assign(static_cast<std::size_t>(n), default_for(e.text));
        return Value{arr};
      }
    }
    return Value{};
  }

  Value literal(const Expr& e) {
    switch (e.literal) {
      case LiteralKind::Int:
      case LiteralKind::Long: {
        std::string t = e.text;
        while (!t.empty() && (t.back() == 'L' || t.back() == 'l')) t.pop_back();
        std::string digits;
        for (char c : t)
          if (c != '_') digits += c;
        return int_value(wrap(std::stoull(digits, nullptr, 0)));
      }
      case LiteralKind::Float:
      case LiteralKind::Double: {
        std::string t = e.text;
        while (!t.empty() && std::isalpha(static_cast<unsigned char>(t.back())) && t.back() != 'e' && t.back() != 'E')
          t.pop_back();
        return Value{std::stod(t)};
      }
      case LiteralKind::Bool: return Value{e.text == "true"};
      case LiteralKind::Char: {
        std::string s = unquote(e.text);
        return int_value(s.empty() ? 0 : static_cast<unsigned char>(s[0]));
      }
      case LiteralKind::String: return Value{unquote(e.text)};
      case LiteralKind::Null: return Value{};
    }
    return Value{};
  }

  Value call(const Expr& e) {
    const Expr& callee = e.children[0];
    std::vector<Value> args;
    std::string receiver;
    std::optional<Value> self;
    std::string method;
    if (callee.kind == Expr::Kind::Field) {
      method = callee.text;
      const Expr& base = callee.children[0];
      if (base.kind == Expr::Kind::Name && !lookup(base.text)) {
        receiver = base.text;
      } else {
        self = eval(base);
        if (std::holds_alternative<std::monostate>(self->v)) throw JavaThrow{"NullPointerException", "." + method};
        receiver = to_string(*self);
      }
    } else {
      method = callee.kind == Expr::Kind::Name ? callee.text : to_string(eval(callee));
      receiver = "this";
    }
    for (std::size_t i = 1; i < e.children.size(); ++i) args.push_back(eval(e.children[i]));
    if (self && is_string(*self))
      if (auto v = string_method(std::get<std::string>(self->v), method, args)) return *v;
    std::string entry = receiver + "." + method + "(";
    for (std::size_t i = 0; i < args.size(); ++i) entry += (i ? "," : "") + to_string(args[i]);
    entry += ")";
    calls_.push_back(entry);
    return opaque(entry + "#" + std::to_string(calls_.size()));
  }

  // Modelled String methods; others fall through to the call log.
  std::optional<Value> string_method(const std::string& s, const std::string& m, const std::vector<Value>& a) {
    auto str = [&](std::size_t i) -> std::optional<std::string> {
      if (i < a.size() && is_string(a[i])) return std::get<std::string>(a[i].v);
      return std::nullopt;
    };
    if (m == "length" && a.empty()) return int_value(static_cast<std::int64_t>(s.size()));
    if (m == "isEmpty" && a.empty()) return Value{s.empty()};
    if (m == "contains" && a.size() == 1 && str(0)) return Value{s.find(*str(0)) != std::string::npos};
    if (m == "indexOf" && a.size() == 1 && str(0)) {
      auto at = s.find(*str(0));
      return int_value(at == std::string::npos ? -1 : static_cast<std::int64_t>(at));
    }
    if (m == "equals" && a.size() == 1) return Value{str(0) && *str(0) == s};
    if (m == "startsWith" && a.size() == 1 && str(0)) return Value{s.rfind(*str(0), 0) == 0};
    if (m == "endsWith" && a.size() == 1 && str(0))
      return Value{s.size() >= str(0)->size() && s.compare(s.size() - str(0)->size(), str(0)->size(), *str(0)) == 0};
    if (m == "charAt" && a.size() == 1 && is_int(a[0])) {
      std::int64_t i = as_int(a[0]);
      if (i < 0 || static_cast<std::size_t>(i) >= s.size())
        throw JavaThrow{"StringIndexOutOfBoundsException", std::to_string(i)};
      return int_value(static_cast<unsigned char>(s[static_cast<std::size_t>(i)]));
    }
    if (m == "toUpperCase" && a.empty()) {
      std::string out = s;
      for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return Value{out};
    }
    if (m == "toLowerCase" && a.empty()) {
      std::string out = s;
      for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return Value{out};
    }
    if (m == "trim" && a.empty()) {
      auto b = s.find_first_not_of(" \t\n\r");
      if (b == std::string::npos) return Value{std::string()};
      return Value{s.substr(b, s.find_last_not_of(" \t\n\r") - b + 1)};
    }
    return std::nullopt;
  }

  Value unary(const Expr& e) {
    const std::string& op = e.text;
    if (op == "++" || op == "--") {
      Value old = eval(e.children[0]);
      Value v = arith(op == "++" ? "+" : "-", old, int_value(1));
      store(e.children[0], v);
      return v;
    }
    Value x = eval(e.children[0]);
    if (op == "!") return Value{!as_bool(x)};
    if (op == "-") return is_double(x) ? Value{-as_double(x)} : int_value(wrap(0ULL - static_cast<std::uint64_t>(as_int(x))));
    if (op == "+") {
      if (!is_num(x)) throw JavaThrow{"ClassCastException", "unary + on " + to_string(x)};
      return x;
    }
    if (op == "~") return int_value(~as_int(x));
    // Casts and other prefix forms are not modelled.
    throw JavaThrow{"UnsupportedOperationException", "unary " + op};
  }

  Value binary(const Expr& e) {
    const std::string& op = e.text;
    if (op == "&&") return Value{as_bool(eval(e.children[0])) && as_bool(eval(e.children[1]))};
    if (op == "||") return Value{as_bool(eval(e.children[0])) || as_bool(eval(e.children[1]))};
    Value a = eval(e.children[0]);
    Value b = eval(e.children[1]);
    return arith(op, a, b);
  }

  Value arith(const std::string& op, const Value& a, const Value& b) {
    if (op == "+" && (is_string(a) || is_string(b))) return Value{to_string(a) + to_string(b)};
    if (op == "==") return Value{a == b || (is_num(a) && is_num(b) && as_double(a) == as_double(b))};
    if (op == "!=") return Value{!(a == b || (is_num(a) && is_num(b) && as_double(a) == as_double(b)))};
    if (is_bool(a) && is_bool(b)) {
      bool x = as_bool(a), y = as_bool(b);
      if (op == "&") return Value{x && y};
      if (op == "|") return Value{x || y};
      if (op == "^") return Value{x != y};
    }
    if (!is_num(a) || !is_num(b))
      throw JavaThrow{"ClassCastException", to_string(a) + " " + op + " " + to_string(b)};
    if (op == "<") return Value{as_double(a) < as_double(b)};
    if (op == "<=") return Value{as_double(a) <= as_double(b)};
    if (op == ">") return Value{as_double(a) > as_double(b)};
    if (op == ">=") return Value{as_double(a) >= as_double(b)};
    if (is_double(a) || is_double(b)) {
      double x = as_double(a), y = as_double(b);
      if (op == "+") return Value{x + y};
      if (op == "-") return Value{x - y};
      if (op == "*") return Value{x * y};
      if (op == "/") return Value{x / y};
      if (op == "%") return Value{std::fmod(x, y)};
      throw JavaThrow{"ClassCastException", "operator " + op + " on doubles"};
    }
    std::uint64_t x = static_cast<std::uint64_t>(as_int(a)), y = static_cast<std::uint64_t>(as_int(b));
    std::int64_t sx = as_int(a), sy = as_int(b);
    if (op == "+") return int_value(wrap(x + y));
    if (op == "-") return int_value(wrap(x - y));
    if (op == "*") return int_value(wrap(x * y));
    if (op == "/" || op == "%") {
      if (sy == 0) throw JavaThrow{"ArithmeticException", "/ by zero"};
      if (sy == -1) return op == "/" ? int_value(wrap(0ULL - x)) : int_value(0);
      return op == "/" ? int_value(sx / sy) : int_value(sx % sy);
    }
    if (op == "&") return int_value(sx & sy);
    if (op == "|") return int_value(sx | sy);
    if (op == "^") return int_value(sx ^ sy);
    if (op == "<<") return int_value(wrap(x << (y & 63)));
    if (op == ">>") return int_value(sx >> (y & 63));
    if (op == ">>>") return int_value(wrap(x >> (y & 63)));
    throw JavaThrow{"UnsupportedOperationException", "operator " + op};
  }
};

}  // namespace

Outcome interpret(const MethodUnit& method, const std::vector<Value>& args, std::size_t step_limit) {
  return Machine(step_limit).run(method, args);
}

std::vector<Value> random_arguments(const MethodHeader& header, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  static const std::vector<std::string> strings{"", "a", "abc", "hello world", "x,y", "Patic"};
  std::function<Value(const std::string&)> make = [&](const std::string& type) -> Value {
    if (type.size() > 2 && type.compare(type.size() - 2, 2, "[]") == 0) {
      auto arr = std::make_shared<ArrayValue>();
      std::size_t n = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
      for (std::size_t i = 0; i < n; ++i) arr->items.push_back(make(type.substr(0, type.size() - 2)));
      return Value{arr};
    }
    if (type == "int" || type == "long" || type == "short" || type == "byte" || type == "Integer" || type == "Long")
      return Value{std::uniform_int_distribution<std::int64_t>(-10, 10)(rng)};
    if (type == "double" || type == "float" || type == "Double" || type == "Float")
      return Value{static_cast<double>(std::uniform_int_distribution<int>(-20, 20)(rng)) / 2.0};
    if (type == "boolean" || type == "Boolean") return Value{std::uniform_int_distribution<int>(0, 1)(rng) == 1};
    if (type == "char") return Value{std::uniform_int_distribution<std::int64_t>('a', 'z')(rng)};
    if (type == "String") return Value{strings[std::uniform_int_distribution<std::size_t>(0, strings.size() - 1)(rng)]};
    return Value{type + "#" + std::to_string(std::uniform_int_distribution<int>(0, 9)(rng))};
  };
  std::vector<Value> out;
  for (const auto& p : header.params) out.push_back(make(p.type));
  return out;
}

}  // namespace patic
