#include <algorithm>
#include <limits>
#include <map>

#include "patic/concretize.hpp"
#include "patic/errors.hpp"

namespace patic {

namespace {

using Forest = std::vector<ShapeNode>;

Forest shape_of(const std::vector<Stmt>& body) {
  Forest out;
  for (const auto& s : body) {
    ShapeNode n;
    switch (s.kind) {
      case Stmt::Kind::If:
        n.kind = s.has_else ? ShapeNode::Kind::IfElse : ShapeNode::Kind::If;
        n.blocks.push_back(shape_of(s.body));
        if (s.has_else) n.blocks.push_back(shape_of(s.else_body));
        break;
      case Stmt::Kind::While:
        n.kind = ShapeNode::Kind::While;
        n.blocks.push_back(shape_of(s.body));
        break;
      case Stmt::Kind::For:
        n.kind = ShapeNode::Kind::For;
        n.blocks.push_back(shape_of(s.body));
        break;
      case Stmt::Kind::Try:
        n.kind = ShapeNode::Kind::Try;
        n.catches = s.catches.size();
        n.has_finally = s.has_finally;
        n.blocks.push_back(shape_of(s.body));
        for (const auto& c : s.catches) n.blocks.push_back(shape_of(c.body));
        if (s.has_finally) n.blocks.push_back(shape_of(s.finally_body));
        break;
      default:
        continue;
    }
    out.push_back(std::move(n));
  }
  return out;
}

void write(const Forest& f, std::string& out) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ',';
    const auto& n = f[i];
    auto blk = [&](std::size_t b) {
      out += '{';
      write(n.blocks[b], out);
      out += '}';
    };
    switch (n.kind) {
      case ShapeNode::Kind::If: out += "if"; blk(0); break;
      case ShapeNode::Kind::IfElse: out += "ifelse"; blk(0); blk(1); break;
      case ShapeNode::Kind::While: out += "while"; blk(0); break;
      case ShapeNode::Kind::For: out += "for"; blk(0); break;
      case ShapeNode::Kind::Try:
        out += "try";
        blk(0);
        for (std::size_t c = 0; c < n.catches; ++c) {
          out += "catch";
          blk(1 + c);
        }
        if (n.has_finally) {
          out += "finally";
          blk(1 + n.catches);
        }
        break;
    }
  }
}

struct ShapeParser {
  const std::string& s;
  std::size_t pos = 0;

  bool eat(std::string_view word) {
    if (s.compare(pos, word.size(), word) != 0) return false;
    pos += word.size();
    return true;
  }
  [[noreturn]] void fail() { throw DataError("malformed shape '" + s + "' at " + std::to_string(pos)); }
  Forest block() {
    if (!eat("{")) fail();
    Forest f = forest();
    if (!eat("}")) fail();
    return f;
  }
  Forest forest() {
    Forest out;
    while (pos < s.size() && s[pos] != '}') {
      ShapeNode n;
      if (eat("ifelse")) {
        n.kind = ShapeNode::Kind::IfElse;
        n.blocks.push_back(block());
        n.blocks.push_back(block());
      } else if (eat("if")) {
        n.kind = ShapeNode::Kind::If;
        n.blocks.push_back(block());
      } else if (eat("while")) {
        n.kind = ShapeNode::Kind::While;
        n.blocks.push_back(block());
      } else if (eat("for")) {
        n.kind = ShapeNode::Kind::For;
        n.blocks.push_back(block());
      } else if (eat("try")) {
        n.kind = ShapeNode::Kind::Try;
        n.blocks.push_back(block());
        n.catches = 0;
        while (eat("catch")) {
          n.blocks.push_back(block());
          ++n.catches;
        }
        if (eat("finally")) {
          n.has_finally = true;
          n.blocks.push_back(block());
        }
        if (n.catches == 0 && !n.has_finally) fail();
      } else {
        fail();
      }
      out.push_back(std::move(n));
      if (pos < s.size() && s[pos] == ',') ++pos;
    }
    return out;
  }
};

std::size_t count_blocks(const Forest& f) {
  std::size_t n = 0;
  for (const auto& node : f)
    for (const auto& b : node.blocks) n += 1 + count_blocks(b);
  return n;
}

std::size_t count_gaps(const Forest& f) {
  std::size_t n = f.size() + 1;
  for (const auto& node : f)
    for (const auto& b : node.blocks) n += count_gaps(b);
  return n;
}

// ---- building a program from a shape ---------------------------------------

struct Predicates {
  std::vector<const Stmt*> ifs, whiles, fors, tries;

  void collect(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      switch (s.kind) {
        case Stmt::Kind::If: ifs.push_back(&s); break;
        case Stmt::Kind::While: whiles.push_back(&s); break;
        case Stmt::Kind::For: fors.push_back(&s); break;
        case Stmt::Kind::Try: tries.push_back(&s); break;
        default: break;
      }
      for (std::size_t b = 0; b < block_count(s); ++b) collect(block(s, b));
    }
  }
};

const Stmt& template_stmt(const char* src) {
  static std::map<std::string, Stmt> cache;
  auto it = cache.find(src);
  if (it == cache.end()) it = cache.emplace(src, parse_method(std::string("void f() { ") + src + " }").body.at(0)).first;
  return it->second;
}

struct Builder {
  const Predicates& preds;
  const std::vector<std::vector<Stmt>>& units;  // statements per unit
  const std::vector<std::size_t>& gap_of_unit;
  std::size_t next_unit = 0;
  std::size_t gap = 0;
  std::size_t used_if = 0, used_while = 0, used_for = 0, used_try = 0;

  void flush(std::vector<Stmt>& out) {
    while (next_unit < units.size() && gap_of_unit[next_unit] == gap) {
      for (const auto& s : units[next_unit]) out.push_back(s);
      ++next_unit;
    }
    ++gap;
  }

  std::vector<Stmt> block_of(const Forest& f, bool top) {
    std::vector<Stmt> out;
    flush(out);
    for (const auto& n : f) {
      out.push_back(control(n));
      flush(out);
    }
    if (out.empty() && !top) out.push_back(Stmt::empty());
    return out;
  }

  Stmt control(const ShapeNode& n) {
    Stmt s;
    switch (n.kind) {
      case ShapeNode::Kind::If:
      case ShapeNode::Kind::IfElse: {
        const Stmt& src = preds.ifs.empty() ? template_stmt("if (true) { }") : *preds.ifs[used_if++ % preds.ifs.size()];
        s.kind = Stmt::Kind::If;
        s.expr = src.expr;
        s.body = block_of(n.blocks[0], false);
        if (n.kind == ShapeNode::Kind::IfElse) {
          s.has_else = true;
          s.else_body = block_of(n.blocks[1], false);
        }
        break;
      }
      case ShapeNode::Kind::While: {
        const Stmt& src =
            preds.whiles.empty() ? template_stmt("while (true) { }") : *preds.whiles[used_while++ % preds.whiles.size()];
        s.kind = Stmt::Kind::While;
        s.expr = src.expr;
        s.body = block_of(n.blocks[0], false);
        break;
      }
      case ShapeNode::Kind::For: {
        const Stmt& src = preds.fors.empty() ? template_stmt("for (int i = 0; i < 1; i++) { }")
                                             : *preds.fors[used_for++ % preds.fors.size()];
        s.kind = Stmt::Kind::For;
        s.init = src.init;
        s.expr = src.expr;
        s.update = src.update;
        s.body = block_of(n.blocks[0], false);
        break;
      }
      case ShapeNode::Kind::Try: {
        const Stmt* src = preds.tries.empty() ? nullptr : preds.tries[used_try++ % preds.tries.size()];
        const Stmt& fallback = template_stmt("try { } catch (Exception e) { }");
        s.kind = Stmt::Kind::Try;
        s.body = block_of(n.blocks[0], false);
        for (std::size_t c = 0; c < n.catches; ++c) {
          const CatchClause& cc = src && c < src->catches.size() ? src->catches[c] : fallback.catches[0];
          s.catches.push_back({cc.type, cc.name, block_of(n.blocks[1 + c], false)});
        }
        if (n.has_finally) {
          s.has_finally = true;
          s.finally_body = block_of(n.blocks[1 + n.catches], false);
        }
        break;
      }
    }
    return s;
  }
};

struct Units {
  std::vector<std::vector<Stmt>> stmts;
  std::optional<std::size_t> core;  // index of the anchor core unit
};

Units placement(const MethodUnit& origin, const StatementSet& anchor) {
  Units u;
  bool core_placed = false;
  std::vector<Stmt> core;
  if (!anchor.empty()) core = restrict(origin, anchor).body;
  for (const auto& p : statement_universe(origin)) {
    if (anchor.count(p)) {
      if (!core_placed) {
        u.core = u.stmts.size();
        u.stmts.push_back(core);
        core_placed = true;
      }
      continue;
    }
    const Stmt& s = statement_at(origin, p);
    if (!is_control(s)) u.stmts.push_back({s});
  }
  return u;
}

void top_gaps(const Forest& f, std::size_t& gap, bool top, std::vector<std::size_t>& out) {
  if (top) out.push_back(gap);
  ++gap;
  for (const auto& n : f) {
    for (const auto& b : n.blocks) top_gaps(b, gap, false, out);
    if (top) out.push_back(gap);
    ++gap;
  }
}

}  // namespace

std::string to_string(const CfShape& shape) {
  if (shape.roots.empty()) return "straight";
  std::string out;
  write(shape.roots, out);
  return out;
}

CfShape shape_from_string(const std::string& text) {
  if (text == "straight") return {};
  ShapeParser p{text};
  CfShape out{p.forest()};
  if (p.pos != text.size()) p.fail();
  return out;
}

CfShape cf_shape(const MethodUnit& method) { return {shape_of(method.body)}; }

CfShape cf_shape_outside(const MethodUnit& method, const StatementSet& anchor) {
  if (anchor.empty()) return cf_shape(method);
  StatementSet rest = statement_universe(method);
  for (const auto& p : anchor) rest.erase(p);
  return cf_shape(restrict(method, rest));
}

std::size_t block_slots(const CfShape& shape) { return count_blocks(shape.roots); }

std::vector<CfShape> shape_catalog() {
  using K = ShapeNode::Kind;
  const K kinds[] = {K::If, K::IfElse, K::While, K::For, K::Try};
  auto node = [](K k) {
    ShapeNode n;
    n.kind = k;
    n.blocks.resize(k == K::IfElse || k == K::Try ? 2 : 1);
    return n;
  };
  std::vector<CfShape> out;
  for (K k : kinds) out.push_back({{node(k)}});
  for (K outer : kinds)
    for (K inner : kinds) {
      ShapeNode n = node(outer);
      n.blocks[0].push_back(node(inner));
      out.push_back({{n}});
    }
  return out;
}

std::vector<CfShape> shape_catalog_with(const CfShape& extra) {
  auto out = shape_catalog();
  if (std::find(out.begin(), out.end(), extra) == out.end()) out.push_back(extra);
  return out;
}

std::size_t shape_gap_count(const CfShape& shape) { return count_gaps(shape.roots); }

std::vector<std::size_t> top_level_gaps(const CfShape& shape) {
  std::vector<std::size_t> out;
  std::size_t gap = 0;
  top_gaps(shape.roots, gap, true, out);
  return out;
}

std::size_t placement_units(const MethodUnit& origin, const StatementSet& anchor) {
  return placement(origin, anchor).stmts.size();
}

std::optional<NearestShapeResult> realize_shape(const MethodUnit& origin, const CfShape& shape,
                                                const StatementSet& anchor, const ShapeAssignment& assignment) {
  Units units = placement(origin, anchor);
  const auto& gaps = assignment.gaps;
  if (gaps.size() != units.stmts.size()) return std::nullopt;
  std::size_t ngaps = shape_gap_count(shape);
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (gaps[i] >= ngaps || (i && gaps[i] < gaps[i - 1])) return std::nullopt;
  std::size_t core_gap = 0;
  if (units.core) {
    auto tops = top_level_gaps(shape);
    core_gap = gaps[*units.core];
    if (std::find(tops.begin(), tops.end(), core_gap) == tops.end()) return std::nullopt;
  }
  Predicates preds;
  preds.collect(origin.body);
  Builder b{preds, units.stmts, gaps};
  NearestShapeResult r;
  r.method.header = origin.header;
  r.method.body = b.block_of(shape.roots, true);
  r.assignment = assignment;
  if (units.core) {
    // The core sits at top level after the units and controls before it.
    std::size_t index = 0;
    auto tops = top_level_gaps(shape);
    for (std::size_t t = 0; t < tops.size() && tops[t] < core_gap; ++t) ++index;  // controls before the gap
    for (std::size_t i = 0; i < *units.core; ++i)
      if (std::find(tops.begin(), tops.end(), gaps[i]) != tops.end()) index += units.stmts[i].size();
    MethodUnit core{origin.header, units.stmts[*units.core]};
    for (const auto& p : statement_universe(core)) {
      StatementPath q = p;
      q[0].index += static_cast<std::uint32_t>(index);
      r.anchor_paths.insert(q);
    }
  }
  r.distance = method_distance(origin, r.method);
  return r;
}

NearestShapeResult nearest_with_shape(const MethodUnit& origin, const CfShape& shape, const StatementSet& anchor,
                                      const NearestShapeOptions& options) {
  if (shape == cf_shape_outside(origin, anchor)) {
    NearestShapeResult r;
    r.method = origin;
    r.anchor_paths = anchor;
    return r;
  }
  const std::size_t u = placement_units(origin, anchor);
  const std::size_t g = shape_gap_count(shape);
  // Non-decreasing assignments of u units to g gaps: C(u + g - 1, u).
  double total = 1;
  for (std::size_t i = 1; i <= u; ++i) total = total * static_cast<double>(g - 1 + i) / static_cast<double>(i);

  std::optional<NearestShapeResult> best;
  auto consider = [&](const std::vector<std::size_t>& gaps) {
    auto r = realize_shape(origin, shape, anchor, {gaps});
    if (r && (!best || r->distance < best->distance)) best = std::move(r);
    return r.has_value();
  };

  if (total <= static_cast<double>(options.exhaustive_limit)) {
    std::vector<std::size_t> gaps(u, 0);
    while (true) {
      consider(gaps);
      // Next non-decreasing sequence in lexicographic order.
      std::size_t i = u;
      while (i > 0 && gaps[i - 1] == g - 1) --i;
      if (i == 0) break;
      ++gaps[i - 1];
      for (std::size_t j = i; j < u; ++j) gaps[j] = gaps[i - 1];
    }
    if (!best) throw DataError("no placement realizes shape " + to_string(shape));
    return *best;
  }

  // Local search: start with everything in the first top-level gap, then move
  // single units while the distance drops.
  std::vector<std::size_t> gaps(u, 0);
  consider(gaps);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < u; ++i) {
      std::size_t lo = i ? gaps[i - 1] : 0, hi = i + 1 < u ? gaps[i + 1] : g - 1;
      for (std::size_t v = lo; v <= hi; ++v) {
        if (v == gaps[i]) continue;
        auto trial = gaps;
        trial[i] = v;
        std::size_t before = best ? best->distance : std::numeric_limits<std::size_t>::max();
        consider(trial);
        if (best && best->distance < before) {
          gaps = trial;
          improved = true;
        }
      }
    }
  }
  if (!best) throw DataError("no placement realizes shape " + to_string(shape));
  best->exhaustive = false;
  return *best;
}

}  // namespace patic
