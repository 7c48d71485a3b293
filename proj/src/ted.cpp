#include <algorithm>
#include <map>
#include <queue>
#include <unordered_map>

#include "patic/edit.hpp"

namespace patic {

namespace {

std::size_t forest_size(const Forest& f) {
  std::size_t n = 0;
  for (const auto& t : f) n += t.size();
  return n;
}

// ---- swap-aware forest DP ---------------------------------------------------------

struct Postorder {
  std::vector<int> label;     // interned label id
  std::vector<int> leftmost;  // leftmost leaf (postorder index) of each node's subtree
  std::vector<int> keyroots;
};

void flatten(const AstNode& n, std::map<std::string, int>& ids, Postorder& po) {
  int first = static_cast<int>(po.label.size());
  for (const auto& c : n.children) flatten(c, ids, po);
  int self = static_cast<int>(po.label.size());
  po.label.push_back(ids.emplace(n.label, static_cast<int>(ids.size())).first->second);
  po.leftmost.push_back(n.children.empty() ? self : po.leftmost[first]);
}

Postorder postorder_of(const Forest& f, std::map<std::string, int>& ids) {
  // A virtual root gives the top-level trees a common parent; it is matched
  // to the other side's virtual root at no cost.
  AstNode root{"\x01root", f};
  Postorder po;
  flatten(root, ids, po);
  std::vector<bool> seen(po.label.size(), false);
  for (int i = static_cast<int>(po.label.size()) - 1; i >= 0; --i) {
    if (!seen[po.leftmost[i]]) {
      seen[po.leftmost[i]] = true;
      po.keyroots.push_back(i);
    }
  }
  std::sort(po.keyroots.begin(), po.keyroots.end());
  return po;
}

}  // namespace

std::size_t forest_distance_dp(const Forest& a, const Forest& b, bool with_swaps) {
  std::map<std::string, int> ids;
  Postorder A = postorder_of(a, ids);
  Postorder B = postorder_of(b, ids);
  const int n = static_cast<int>(A.label.size());
  const int m = static_cast<int>(B.label.size());
  std::vector<int> td(static_cast<std::size_t>(n) * m, 0);
  auto TD = [&](int i, int j) -> int& { return td[static_cast<std::size_t>(i) * m + j]; };

  std::vector<int> fd;
  for (int k1 : A.keyroots) {
    for (int k2 : B.keyroots) {
      const int l1 = A.leftmost[k1];
      const int l2 = B.leftmost[k2];
      const int rows = k1 - l1 + 2;
      const int cols = k2 - l2 + 2;
      fd.assign(static_cast<std::size_t>(rows) * cols, 0);
      // FD(x, y) is the distance between forests A[l1..x] and B[l2..y]; x = l1 - 1 is empty.
      auto FD = [&](int x, int y) -> int& {
        return fd[static_cast<std::size_t>(x - l1 + 1) * cols + (y - l2 + 1)];
      };
      for (int x = l1; x <= k1; ++x) FD(x, l2 - 1) = FD(x - 1, l2 - 1) + 1;
      for (int y = l2; y <= k2; ++y) FD(l1 - 1, y) = FD(l1 - 1, y - 1) + 1;
      for (int x = l1; x <= k1; ++x) {
        for (int y = l2; y <= k2; ++y) {
          int best = std::min(FD(x - 1, y), FD(x, y - 1)) + 1;
          const bool whole_a = A.leftmost[x] == l1;
          const bool whole_b = B.leftmost[y] == l2;
          if (whole_a && whole_b) {
            int rename = A.label[x] == B.label[y] ? 0 : 1;
            best = std::min(best, FD(x - 1, y - 1) + rename);
          } else {
            best = std::min(best, FD(A.leftmost[x] - 1, B.leftmost[y] - 1) + TD(x, y));
          }
          if (with_swaps && A.leftmost[x] > l1 && B.leftmost[y] > l2) {
            // The two rightmost trees of each forest, matched crosswise.
            int px = A.leftmost[x] - 1;
            int py = B.leftmost[y] - 1;
            best = std::min(best, FD(A.leftmost[px] - 1, B.leftmost[py] - 1) + 1 + TD(x, py) + TD(px, y));
          }
          FD(x, y) = best;
          if (whole_a && whole_b) TD(x, y) = best;
        }
      }
    }
  }
  return static_cast<std::size_t>(TD(n - 1, m - 1));
}

// ---- exact search -----------------------------------------------------------------

namespace {

struct SmallNode {
  int label = 0;
  std::vector<SmallNode> kids;
};

using SmallForest = std::vector<SmallNode>;

void encode(const SmallForest& f, std::string& out) {
  for (const auto& n : f) {
    out += static_cast<char>(n.label + 1);
    out += static_cast<char>(n.kids.size() + 1);
    encode(n.kids, out);
  }
}

std::string encode(const SmallForest& f) {
  std::string out;
  encode(f, out);
  return out;
}

SmallForest to_small(const Forest& f, std::map<std::string, int>& ids) {
  SmallForest out;
  for (const auto& n : f) {
    SmallNode s;
    s.label = ids.emplace(n.label, static_cast<int>(ids.size())).first->second;
    s.kids = to_small(n.children, ids);
    out.push_back(std::move(s));
  }
  return out;
}

// Label counts in three blocks: all nodes, leaves, inner nodes.
void count_labels(const SmallForest& f, std::vector<int>& counts, int nlabels) {
  for (const auto& n : f) {
    ++counts[n.label];
    ++counts[(n.kids.empty() ? 1 : 2) * nlabels + n.label];
    count_labels(n.kids, counts, nlabels);
  }
}

// Every edit changes each of the three label multisets by at most one removal
// and one addition, so each multiset difference bounds the remaining cost.
int label_bound(const std::vector<int>& have, const std::vector<int>& want, int nlabels) {
  int bound = 0;
  for (int block = 0; block < 3; ++block) {
    int excess = 0;
    int deficit = 0;
    for (int i = block * nlabels; i < (block + 1) * nlabels; ++i) {
      if (have[i] > want[i]) excess += have[i] - want[i];
      else deficit += want[i] - have[i];
    }
    bound = std::max({bound, excess, deficit});
  }
  return bound;
}

// Visits every sibling list with a callback able to rewrite it in place.
template <class F>
void for_each_list(SmallForest& root, SmallForest& list, F&& f) {
  f(list);
  for (auto& n : list) for_each_list(root, n.kids, f);
}

}  // namespace

std::size_t forest_distance_search(const Forest& a, const Forest& b, std::size_t upper_bound,
                                   std::size_t max_expansions, bool* exhausted) {
  if (exhausted) *exhausted = false;
  std::map<std::string, int> ids;
  SmallForest start = to_small(a, ids);
  SmallForest goal = to_small(b, ids);
  const int nlabels = static_cast<int>(ids.size());
  std::vector<int> want(3 * nlabels, 0);
  count_labels(goal, want, nlabels);
  std::vector<int> target_labels;
  for (int l = 0; l < nlabels; ++l)
    if (want[l] > 0) target_labels.push_back(l);

  const std::string goal_key = encode(goal);
  auto h = [&](const SmallForest& f) {
    std::vector<int> have(3 * nlabels, 0);
    count_labels(f, have, nlabels);
    return label_bound(have, want, nlabels);
  };

  const int bound = static_cast<int>(upper_bound);
  std::unordered_map<std::string, int> best;
  // (f, -g, key): prefer deeper nodes among equal f.
  using Entry = std::tuple<int, int, std::string>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::string start_key = encode(start);
  best[start_key] = 0;
  open.emplace(h(start), 0, start_key);

  auto decode = [](const std::string& key) {
    std::size_t pos = 0;
    auto rec = [&](auto&& self, std::size_t count) -> SmallForest {
      SmallForest f;
      for (std::size_t i = 0; i < count; ++i) {
        SmallNode n;
        n.label = static_cast<unsigned char>(key[pos++]) - 1;
        std::size_t k = static_cast<unsigned char>(key[pos++]) - 1;
        n.kids = self(self, k);
        f.push_back(std::move(n));
      }
      return f;
    };
    SmallForest out;
    while (pos < key.size()) {
      auto one = rec(rec, 1);
      out.push_back(std::move(one.front()));
    }
    return out;
  };

  std::size_t expansions = 0;
  while (!open.empty()) {
    auto [f, neg_g, key] = open.top();
    open.pop();
    int g = -neg_g;
    if (f >= bound) break;
    auto it = best.find(key);
    if (it != best.end() && it->second < g) continue;
    if (key == goal_key) return static_cast<std::size_t>(g);
    if (++expansions > max_expansions) {
      if (exhausted) *exhausted = true;
      return upper_bound;
    }
    SmallForest cur = decode(key);
    auto push = [&](const SmallForest& next) {
      std::string k = encode(next);
      auto found = best.find(k);
      if (found != best.end() && found->second <= g + 1) return;
      int fn = g + 1 + h(next);
      if (fn >= bound) return;
      best[k] = g + 1;
      open.emplace(fn, -(g + 1), std::move(k));
    };
    for_each_list(cur, cur, [&](SmallForest& list) {
      const std::size_t len = list.size();
      for (std::size_t k = 0; k < len; ++k) {
        int old = list[k].label;
        for (int l : target_labels) {
          if (l == old) continue;
          list[k].label = l;
          push(cur);
        }
        list[k].label = old;

        SmallNode removed = list[k];
        list.erase(list.begin() + static_cast<std::ptrdiff_t>(k));
        list.insert(list.begin() + static_cast<std::ptrdiff_t>(k), removed.kids.begin(), removed.kids.end());
        push(cur);
        list.erase(list.begin() + static_cast<std::ptrdiff_t>(k),
                   list.begin() + static_cast<std::ptrdiff_t>(k + removed.kids.size()));
        list.insert(list.begin() + static_cast<std::ptrdiff_t>(k), std::move(removed));

        if (k + 1 < len) {
          std::swap(list[k], list[k + 1]);
          push(cur);
          std::swap(list[k], list[k + 1]);
        }
      }
      for (std::size_t s = 0; s <= len; ++s) {
        for (std::size_t c = 0; s + c <= len; ++c) {
          for (int l : target_labels) {
            SmallForest saved(list.begin() + static_cast<std::ptrdiff_t>(s),
                              list.begin() + static_cast<std::ptrdiff_t>(s + c));
            SmallNode fresh{l, saved};
            list.erase(list.begin() + static_cast<std::ptrdiff_t>(s), list.begin() + static_cast<std::ptrdiff_t>(s + c));
            list.insert(list.begin() + static_cast<std::ptrdiff_t>(s), std::move(fresh));
            push(cur);
            list.erase(list.begin() + static_cast<std::ptrdiff_t>(s));
            list.insert(list.begin() + static_cast<std::ptrdiff_t>(s), saved.begin(), saved.end());
          }
        }
      }
    });
  }
  return upper_bound;
}

std::size_t forest_edit_distance(const Forest& a, const Forest& b, const DistanceOptions& options) {
  std::size_t upper = forest_distance_dp(a, b, true);
  if (upper == 0) return 0;
  if (std::max(forest_size(a), forest_size(b)) > options.exact_node_limit) return upper;
  return forest_distance_search(a, b, upper, options.exact_expansion_limit);
}

std::size_t tree_edit_distance(const AstNode& a, const AstNode& b, const DistanceOptions& options) {
  return forest_edit_distance(Forest{a}, Forest{b}, options);
}

std::size_t method_distance(const MethodUnit& a, const MethodUnit& b, const DistanceOptions& options) {
  return tree_edit_distance(to_tree(a), to_tree(b), options);
}

}  // namespace patic
