#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>

#include "patic/edit.hpp"
#include "patic/errors.hpp"

namespace patic {

EditOp EditOp::insert(TreePath parent, std::uint32_t index, std::string label, std::uint32_t adopt) {
  return EditOp{Kind::Insert, std::move(parent), index, adopt, std::move(label)};
}

EditOp EditOp::remove(TreePath node) { return EditOp{Kind::Delete, std::move(node), 0, 0, {}}; }

EditOp EditOp::rename(TreePath node, std::string label) {
  return EditOp{Kind::Rename, std::move(node), 0, 0, std::move(label)};
}

EditOp EditOp::swap(TreePath parent, std::uint32_t index) { return EditOp{Kind::Swap, std::move(parent), index, 0, {}}; }

namespace {

std::string path_text(const TreePath& p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
  return s + "]";
}

// Child list addressed by a parent path; the empty path is the forest itself.
Forest& children_at(Forest& forest, const TreePath& parent) {
  Forest* list = &forest;
  for (auto i : parent) {
    if (i >= list->size()) throw PathError("no node at " + path_text(parent));
    list = &(*list)[i].children;
  }
  return *list;
}

}  // namespace

Forest apply(const EditOp& op, const Forest& forest) {
  Forest out = forest;
  switch (op.kind) {
    case EditOp::Kind::Rename:
    case EditOp::Kind::Delete: {
      if (op.path.empty()) throw PathError("edit needs a node path");
      TreePath parent(op.path.begin(), op.path.end() - 1);
      Forest& list = children_at(out, parent);
      auto k = op.path.back();
      if (k >= list.size()) throw PathError("no node at " + path_text(op.path));
      if (op.kind == EditOp::Kind::Rename) {
        list[k].label = op.label;
      } else {
        Forest promoted = std::move(list[k].children);
        list.erase(list.begin() + k);
        list.insert(list.begin() + k, std::make_move_iterator(promoted.begin()), std::make_move_iterator(promoted.end()));
      }
      break;
    }
    case EditOp::Kind::Insert: {
      Forest& list = children_at(out, op.path);
      if (op.index > list.size() || op.adopt > list.size() - op.index)
        throw PathError("insert range out of bounds at " + path_text(op.path));
      AstNode fresh{op.label, {}};
      auto first = list.begin() + op.index;
      fresh.children.assign(std::make_move_iterator(first), std::make_move_iterator(first + op.adopt));
      list.erase(first, first + op.adopt);
      list.insert(list.begin() + op.index, std::move(fresh));
      break;
    }
    case EditOp::Kind::Swap: {
      Forest& list = children_at(out, op.path);
      if (op.index + 1 >= list.size()) throw PathError("swap out of bounds at " + path_text(op.path));
      std::swap(list[op.index], list[op.index + 1]);
      break;
    }
  }
  return out;
}

AstNode apply(const EditOp& op, const AstNode& tree) {
  EditOp shifted = op;
  shifted.path.insert(shifted.path.begin(), 0);
  Forest out = patic::apply(shifted, Forest{tree});
  if (out.size() != 1) throw ArityError("edit does not leave a single tree");
  return std::move(out.front());
}

AstNode apply(const EditScript& script, const AstNode& tree) {
  AstNode cur = tree;
  for (const auto& op : script) cur = patic::apply(op, cur);
  return cur;
}

MethodUnit apply(const EditOp& op, const MethodUnit& method) { return method_from_tree(patic::apply(op, to_tree(method))); }

MethodUnit apply(const EditScript& script, const MethodUnit& method) {
  return method_from_tree(patic::apply(script, to_tree(method)));
}

EditTrajectory replay(const MethodUnit& origin, const EditScript& script) {
  EditTrajectory t{origin, script, {origin}};
  for (const auto& op : script) t.steps.push_back(patic::apply(op, t.steps.back()));
  return t;
}

// ---- json ---------------------------------------------------------------------

namespace {

const char* kind_name(EditOp::Kind k) {
  switch (k) {
    case EditOp::Kind::Insert: return "insert";
    case EditOp::Kind::Delete: return "delete";
    case EditOp::Kind::Rename: return "rename";
    case EditOp::Kind::Swap: return "swap";
  }
  return "rename";
}

}  // namespace

nlohmann::json to_json(const EditOp& op) {
  nlohmann::json j;
  j["op"] = kind_name(op.kind);
  j["path"] = op.path;
  switch (op.kind) {
    case EditOp::Kind::Insert:
      j["index"] = op.index;
      j["label"] = op.label;
      if (op.adopt) j["adopt"] = op.adopt;
      break;
    case EditOp::Kind::Rename: j["label"] = op.label; break;
    case EditOp::Kind::Swap: j["index"] = op.index; break;
    case EditOp::Kind::Delete: break;
  }
  return j;
}

nlohmann::json to_json(const EditScript& script) {
  auto j = nlohmann::json::array();
  for (const auto& op : script) j.push_back(to_json(op));
  return j;
}

EditOp edit_op_from_json(const nlohmann::json& j) {
  try {
    EditOp op;
    const std::string kind = j.at("op").get<std::string>();
    if (kind == "insert") op.kind = EditOp::Kind::Insert;
    else if (kind == "delete") op.kind = EditOp::Kind::Delete;
    else if (kind == "rename") op.kind = EditOp::Kind::Rename;
    else if (kind == "swap") op.kind = EditOp::Kind::Swap;
    else throw DataError("unknown edit op '" + kind + "'");
    op.path = j.at("path").get<TreePath>();
    op.index = j.value("index", 0u);
    op.adopt = j.value("adopt", 0u);
    op.label = j.value("label", std::string());
    return op;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed edit op: ") + e.what());
  }
}

EditScript edit_script_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DataError("edit script must be an array");
  EditScript out;
  for (const auto& e : j) out.push_back(edit_op_from_json(e));
  return out;
}

// ---- vocabulary ---------------------------------------------------------------

Vocabulary Vocabulary::builtin() {
  return Vocabulary{{"data",    "value",   "result", "item",   "list",    "index",  "count",   "size",
                     "name",    "file",    "image",  "buffer", "stream",  "text",   "string",  "object",
                     "node",    "key",     "map",    "entry",  "path",    "line",   "input",   "output",
                     "source",  "target",  "message", "error", "event",   "handler", "config", "state",
                     "record",  "field",   "number", "total",  "length",  "offset", "start",   "end",
                     "left",    "right",   "first",  "last",   "next",    "prev",   "parent",  "child",
                     "temp",    "flag",    "status", "info",   "token",   "label",  "type",    "mode",
                     "level",   "limit",   "range",  "array",  "element", "context", "request", "reader"}};
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read vocabulary " + path);
  Vocabulary v;
  std::string w;
  while (std::getline(in, w)) {
    while (!w.empty() && std::isspace(static_cast<unsigned char>(w.back()))) w.pop_back();
    if (!w.empty() && w[0] != '#') v.words.push_back(w);
  }
  return v;
}

// ---- enumeration --------------------------------------------------------------

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty() || is_reserved_word(s)) return false;
  try {
    auto toks = tokenize(s);
    return toks.size() == 2 && toks[0].kind == Token::Kind::Ident;
  } catch (const SyntaxError&) {
    return false;
  }
}

void collect_labels(const AstNode& n, std::string_view kind, std::vector<std::string>& out) {
  if (label_kind(n.label) == kind) out.push_back(label_value(n.label));
  for (const auto& c : n.children) collect_labels(c, kind, out);
}

std::vector<std::string> ordered_unique(const std::vector<std::string>& xs) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& x : xs)
    if (seen.insert(x).second) out.push_back(x);
  return out;
}

std::string capitalize(std::string w) {
  if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
  return w;
}

const std::vector<std::string> kBinaryOps = {"||", "&&", "|", "^", "&", "==", "!=", "<", ">", "<=",
                                             ">=", "<<", ">>", ">>>", "+", "-", "*", "/", "%"};
const std::vector<std::string> kAssignOps = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="};
const std::vector<std::string> kUnaryOps = {"+", "-", "!", "~", "++", "--"};
const std::vector<std::string> kPostfixOps = {"++", "--"};

// Node kinds that carry no payload in their label and can be relabeled into one another.
const std::vector<std::string> kStructuralKinds = {"Field",    "Call",     "Index",  "Binary", "Unary", "Postfix",
                                                   "Assign",   "New",      "NewArray", "LocalVar", "ExprStmt",
                                                   "Return",   "Throw",    "If",     "While",  "Break", "Continue",
                                                   "Empty"};

const std::vector<std::string>& operator_pool(const std::string& parent) {
  static const std::vector<std::string> none;
  if (parent == "Binary") return kBinaryOps;
  if (parent == "Assign") return kAssignOps;
  if (parent == "Unary") return kUnaryOps;
  if (parent == "Postfix") return kPostfixOps;
  return none;
}

std::vector<std::string> split_words(const std::string& body) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : body) {
    if (c == ' ') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> literal_pool(LiteralKind kind, const std::string& lexeme, const MethodUnit& m,
                                      const EnumerationOptions& options) {
  std::vector<std::string> in_method;
  for (const auto& s : m.body) collect_labels(to_tree(s), "Lit", in_method);
  std::vector<std::string> pool;
  const std::string prefix = std::string(literal_kind_name(kind)) + ":";
  for (const auto& v : in_method)
    if (v.rfind(prefix, 0) == 0) pool.push_back(v.substr(prefix.size()));
  switch (kind) {
    case LiteralKind::Int: pool.insert(pool.end(), {"0", "1", "2"}); break;
    case LiteralKind::Long: pool.insert(pool.end(), {"0L", "1L"}); break;
    case LiteralKind::Float: pool.insert(pool.end(), {"0.0f", "1.0f"}); break;
    case LiteralKind::Double: pool.insert(pool.end(), {"0.0", "1.0"}); break;
    case LiteralKind::Bool: pool.insert(pool.end(), {"true", "false"}); break;
    case LiteralKind::Char: pool.push_back("'a'"); break;
    case LiteralKind::Null: break;
    case LiteralKind::String: {
      if (lexeme.size() < 2) break;
      auto words = split_words(lexeme.substr(1, lexeme.size() - 2));
      // Words of the method's own strings first, then the caller's, then the
      // head of the vocabulary.
      std::vector<std::string> subs;
      for (const auto& v : in_method)
        if (v.rfind(prefix, 0) == 0 && v.size() >= prefix.size() + 2)
          for (auto& w : split_words(v.substr(prefix.size() + 1, v.size() - prefix.size() - 2)))
            if (!w.empty()) subs.push_back(w);
      subs.insert(subs.end(), options.string_words.begin(), options.string_words.end());
      std::size_t limit = std::min(options.string_word_pool, options.vocabulary.words.size());
      subs.insert(subs.end(), options.vocabulary.words.begin(), options.vocabulary.words.begin() + static_cast<long>(limit));
      subs = ordered_unique(subs);
      for (std::size_t w = 0; w < words.size(); ++w) {
        for (const auto& sub : subs) {
          if (sub == words[w]) continue;
          auto copy = words;
          copy[w] = sub;
          std::string joined;
          for (std::size_t k = 0; k < copy.size(); ++k) joined += (k ? " " : "") + copy[k];
          pool.push_back("\"" + joined + "\"");
        }
      }
      break;
    }
  }
  return ordered_unique(pool);
}

const AstNode& node_at(const AstNode& root, const TreePath& p) {
  const AstNode* n = &root;
  for (auto i : p) n = &n->children.at(i);
  return *n;
}

void collect_shell(const AstNode& n, TreePath& path, std::vector<TreePath>& out) {
  if (n.label == "Block") return;
  out.push_back(path);
  for (std::uint32_t i = 0; i < n.children.size(); ++i) {
    path.push_back(i);
    collect_shell(n.children[i], path, out);
    path.pop_back();
  }
}

}  // namespace

std::vector<std::string> string_literal_words(const MethodUnit& method) {
  std::vector<std::string> lits;
  for (const auto& s : method.body) collect_labels(to_tree(s), "Lit", lits);
  const std::string prefix = "string:";
  std::vector<std::string> out;
  for (const auto& v : lits)
    if (v.rfind(prefix, 0) == 0 && v.size() >= prefix.size() + 2)
      for (auto& w : split_words(v.substr(prefix.size() + 1, v.size() - prefix.size() - 2)))
        if (!w.empty()) out.push_back(w);
  return ordered_unique(out);
}

std::vector<std::string> identifier_candidates(const MethodUnit& method, const Vocabulary& vocab) {
  std::vector<std::string> all;
  for (const auto& p : method.header.params) all.push_back(p.name);
  for (const auto& s : method.body) collect_labels(to_tree(s), "Name", all);
  for (const auto& w : vocab.words) all.push_back(w);
  std::vector<std::string> out;
  for (auto& w : ordered_unique(all))
    if (is_identifier(w)) out.push_back(w);
  return out;
}

std::vector<std::string> type_candidates(const MethodUnit& method, const Vocabulary& vocab) {
  std::vector<std::string> all;
  all.push_back(method.header.result_type);
  for (const auto& p : method.header.params) all.push_back(p.type);
  for (const auto& s : method.body) collect_labels(to_tree(s), "Type", all);
  for (const auto& w : vocab.words) all.push_back(capitalize(w));
  std::vector<std::string> out;
  for (auto& t : ordered_unique(all))
    if (t != "void" && !t.empty() && (!is_reserved_word(t) || t == "int" || t == "long" || t == "boolean" ||
                                      t == "char" || t == "double" || t == "float" || t == "byte" || t == "short"))
      out.push_back(t);
  return out;
}

std::vector<TreePath> editable_nodes(const MethodUnit& method, const StatementSet& frozen) {
  AstNode root = to_tree(method);
  std::vector<TreePath> out;
  for (const auto& sp : statement_universe(method)) {
    if (frozen.count(sp)) continue;
    TreePath tp = tree_path(method, sp);
    collect_shell(node_at(root, tp), tp, out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EditCandidate> enumerate_minimal_valid_edits(const MethodUnit& method, const StatementSet& frozen,
                                                         const EnumerationOptions& options) {
  for (const auto& p : frozen)
    if (!contains_path(method, p)) throw PathError("frozen path " + to_string(p) + " not in method");
  const AstNode root = to_tree(method);
  const std::string original = pretty(method);
  const auto idents = identifier_candidates(method, options.vocabulary);
  const auto types = type_candidates(method, options.vocabulary);

  std::vector<EditCandidate> out;
  std::set<std::string> seen{original};
  // Returns whether the script yields a valid method, recording it if new.
  auto try_script = [&](EditScript script) {
    MethodUnit m;
    try {
      m = patic::apply(script, method);
    } catch (const Error&) {
      return false;
    }
    std::string src = pretty(m);
    try {
      if (parse_method(src) != m) return false;
    } catch (const SyntaxError&) {
      return false;
    }
    if (seen.insert(src).second) out.push_back({std::move(m), std::move(script)});
    return true;
  };

  for (const auto& tp : editable_nodes(method, frozen)) {
    const AstNode& n = node_at(root, tp);
    const std::string kind = label_kind(n.label);
    const std::string value = label_value(n.label);
    if (kind == "Name" && options.rename_identifiers) {
      if (value == "this" || value == "super") continue;
      for (const auto& id : idents)
        if (id != value) try_script({EditOp::rename(tp, "Name:" + id)});
    } else if (kind == "Type" && options.rename_types) {
      for (const auto& t : types)
        if (t != value) try_script({EditOp::rename(tp, "Type:" + t)});
    } else if (kind == "Lit" && options.rename_literals) {
      auto colon = value.find(':');
      std::string kname = value.substr(0, colon);
      std::string lexeme = value.substr(colon + 1);
      LiteralKind lk = LiteralKind::Int;
      for (auto k : {LiteralKind::Int, LiteralKind::Long, LiteralKind::Float, LiteralKind::Double, LiteralKind::Bool,
                     LiteralKind::Char, LiteralKind::String, LiteralKind::Null})
        if (literal_kind_name(k) == kname) lk = k;
      for (const auto& v : literal_pool(lk, lexeme, method, options))
        if (v != lexeme) try_script({EditOp::rename(tp, "Lit:" + kname + ":" + v)});
    } else if (kind == "Op" && options.rename_operators) {
      TreePath parent(tp.begin(), tp.end() - 1);
      for (const auto& op : operator_pool(node_at(root, parent).label))
        if (op != value) try_script({EditOp::rename(tp, "Op:" + op)});
    } else if (options.structural &&
               std::find(kStructuralKinds.begin(), kStructuralKinds.end(), n.label) != kStructuralKinds.end()) {
      bool single = false;
      for (const auto& k : kStructuralKinds)
        if (k != n.label && try_script({EditOp::rename(tp, k)})) single = true;
      if (single) continue;
      // No one-step change of this node's kind is valid: try kind changes that
      // also drop a leaf child or add a leading operator.
      for (const auto& k : kStructuralKinds) {
        if (k == n.label) continue;
        for (std::uint32_t i = 0; i < n.children.size(); ++i) {
          if (!n.children[i].children.empty()) continue;
          TreePath child = tp;
          child.push_back(i);
          try_script({EditOp::rename(tp, k), EditOp::remove(child)});
        }
        for (const auto& op : operator_pool(k))
          try_script({EditOp::rename(tp, k), EditOp::insert(tp, 0, "Op:" + op)});
      }
    }
  }
  return out;
}

}  // namespace patic
