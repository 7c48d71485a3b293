#include "patic/seeds.hpp"

#include <algorithm>

#include "patic/errors.hpp"

namespace patic {

namespace {

using Bits = std::vector<bool>;

bool subset_of(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

std::size_t count(const Bits& a) { return static_cast<std::size_t>(std::count(a.begin(), a.end(), true)); }

// Visits the k-subsets of `items` in lexicographic order until fn returns true.
template <typename Fn>
bool for_each_combination(const std::vector<std::size_t>& items, std::size_t k, Fn&& fn) {
  if (k > items.size()) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (fn(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == items.size() - k + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

class Search {
 public:
  Search(const MethodUnit& method, OracleHandle& oracle, const Label& label)
      : method_(method), oracle_(oracle), label_(label) {
    auto u = statement_universe(method);
    universe_.assign(u.begin(), u.end());
  }

  std::size_t size() const { return universe_.size(); }

  StatementSet paths(const Bits& b) const {
    StatementSet out;
    for (std::size_t i = 0; i < b.size(); ++i)
      if (b[i]) out.insert(universe_[i]);
    return out;
  }

  bool sufficient(const Bits& b) { return oracle_.top1_equals(restrict(method_, paths(b)), label_); }

  Seed make_seed(const Bits& b, std::size_t queries, std::size_t level, const std::string& origin) const {
    Seed s;
    s.origin = origin;
    s.keep = paths(b);
    s.method_view = restrict(method_, s.keep);
    s.label = label_;
    s.queries_used = queries;
    s.level = level;
    return s;
  }

 private:
  const MethodUnit& method_;
  OracleHandle& oracle_;
  const Label& label_;
  std::vector<StatementPath> universe_;
};

void sort_seeds(std::vector<Seed>& seeds) {
  std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
    if (a.keep.size() != b.keep.size()) return a.keep.size() < b.keep.size();
    return a.keep < b.keep;
  });
}

}  // namespace

nlohmann::json to_json(const Seed& seed) {
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : seed.keep) paths.push_back(to_string(p));
  return {{"origin", seed.origin}, {"paths", paths},      {"source", pretty(seed.method_view)},
          {"label", seed.label},   {"level", seed.level}, {"queries_used", seed.queries_used}};
}

Seed seed_from_json(const nlohmann::json& j) {
  try {
    Seed s;
    s.origin = j.at("origin").get<std::string>();
    for (const auto& p : j.at("paths")) s.keep.insert(parse_path(p.get<std::string>()));
    s.method_view = parse_method(j.at("source").get<std::string>());
    s.label = j.at("label").get<Label>();
    s.level = j.value("level", std::size_t{0});
    s.queries_used = j.value("queries_used", std::size_t{0});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed seed record: ") + e.what());
  } catch (const SyntaxError& e) {
    throw DataError(std::string("seed source does not parse: ") + e.what());
  } catch (const PathError& e) {
    throw DataError(std::string("bad seed path: ") + e.what());
  }
}

bool is_absent(const MethodUnit& method, const StatementSet& remaining, OracleHandle& oracle, const Label& label) {
  return !oracle.top1_equals(restrict(method, remaining), label);
}

bool audit_seed(const MethodUnit& method, const StatementSet& keep, OracleHandle& oracle, const Label& label,
                std::size_t* queries) {
  std::size_t q = 1;
  bool ok = oracle.top1_equals(restrict(method, keep), label);
  for (auto it = keep.begin(); ok && it != keep.end(); ++it) {
    StatementSet smaller = keep;
    smaller.erase(*it);
    ++q;
    if (oracle.top1_equals(restrict(method, smaller), label)) ok = false;
  }
  if (queries) *queries += q;
  return ok;
}

std::vector<Seed> find_seeds_bruteforce(const MethodUnit& method, OracleHandle& oracle, const Label& label,
                                        const SeedSearchOptions& options, const std::string& origin) {
  Search search(method, oracle, label);
  const std::size_t n = search.size();
  if (n > options.bruteforce_cap)
    throw CapExceeded("method has " + std::to_string(n) + " statements, brute force cap is " +
                      std::to_string(options.bruteforce_cap));
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<Bits> sufficient;
  std::size_t queries = 0;
  std::vector<Seed> out;
  for (std::size_t k = 1; k <= n; ++k) {
    for_each_combination(all, k, [&](const std::vector<std::size_t>& idx) {
      Bits b(n, false);
      for (auto i : idx) b[i] = true;
      ++queries;
      if (!search.sufficient(b)) return false;
      bool minimal = std::none_of(sufficient.begin(), sufficient.end(), [&](const Bits& s) { return subset_of(s, b); });
      sufficient.push_back(b);
      if (minimal) out.push_back(search.make_seed(b, queries, 0, origin));
      return false;
    });
  }
  sort_seeds(out);
  return out;
}

std::vector<Seed> find_seeds(const MethodUnit& method, OracleHandle& oracle, const Label& label,
                             const SeedSearchOptions& options, SeedSearchStats* stats, const std::string& origin) {
  if (!oracle.top1_equals(method, label))
    throw NotApplicable("the method does not carry label " + to_string(label));
  SeedSearchStats local;
  SeedSearchStats& st = stats ? *stats : local;
  Search search(method, oracle, label);
  const std::size_t n = search.size();
  if (!options.prune) {
    SeedSearchOptions uncapped = options;
    uncapped.bruteforce_cap = std::max(options.bruteforce_cap, n);
    auto seeds = find_seeds_bruteforce(method, oracle, label, uncapped, origin);
    st.selections += (std::size_t{1} << n) - 1;
    return seeds;
  }

  std::vector<Bits> seeds;
  std::vector<Bits> failed;  // known insufficient; so is every subset
  std::vector<Seed> out;
  auto known_insufficient = [&](const Bits& b) {
    return std::any_of(failed.begin(), failed.end(), [&](const Bits& f) { return subset_of(b, f); });
  };
  auto holds_seed = [&](const Bits& b) {
    return std::any_of(seeds.begin(), seeds.end(), [&](const Bits& s) { return subset_of(s, b); });
  };

  Bits region(n, true);
  for (std::size_t level = 0;; ++level) {
    SeedSearchStats::Level lv;
    lv.universe = count(region);
    std::vector<std::size_t> items;
    for (std::size_t i = 0; i < n; ++i)
      if (region[i]) items.push_back(i);
    // Smallest sufficient subset of the region, in size then lexicographic
    // order, skipping sets already known to fail.
    std::optional<Bits> found;
    for (std::size_t k = 1; k <= items.size() && !found; ++k) {
      for_each_combination(items, k, [&](const std::vector<std::size_t>& idx) {
        Bits b(n, false);
        for (auto i : idx) b[items[i]] = true;
        if (holds_seed(b) || known_insufficient(b)) return false;
        ++st.selections;
        ++lv.selections;
        if (search.sufficient(b)) {
          found = b;
          return true;
        }
        failed.push_back(b);
        return false;
      });
    }
    if (!found) {
      // Only a non-monotone model gets here: the region passed as a whole.
      st.levels.push_back(lv);
      break;
    }
    lv.largest_seed = count(*found);
    st.levels.push_back(lv);
    seeds.push_back(*found);
    out.push_back(search.make_seed(*found, st.selections + st.absence_checks, level, origin));

    // Absence check on what the region leaves over.
    std::optional<Bits> next;
    Bits rest = region;
    for (std::size_t i = 0; i < n; ++i)
      if ((*found)[i]) rest[i] = false;
    if (count(rest) > 0 && !known_insufficient(rest)) {
      ++st.absence_checks;
      if (search.sufficient(rest)) next = rest;
      else failed.push_back(rest);
    }
    if (!next && options.overlapping) {
      // A seed not yet found misses some statement of every found seed, so it
      // lives in the complement of one of their hitting sets.
      std::vector<Bits> hits{Bits(n, false)};
      for (const auto& s : seeds) {
        std::vector<Bits> grown;
        for (const auto& h : hits)
          for (std::size_t i = 0; i < n; ++i)
            if (s[i]) {
              Bits g = h;
              g[i] = true;
              if (std::find(grown.begin(), grown.end(), g) == grown.end()) grown.push_back(std::move(g));
            }
        hits = std::move(grown);
      }
      for (const auto& h : hits) {
        Bits cand(n, true);
        for (std::size_t i = 0; i < n; ++i)
          if (h[i]) cand[i] = false;
        if (count(cand) == 0 || known_insufficient(cand)) continue;
        ++st.absence_checks;
        if (search.sufficient(cand)) {
          next = cand;
          break;
        }
        failed.push_back(cand);
      }
    }
    if (!next) break;
    region = *next;
  }

  if (options.audit) {
    std::vector<Seed> kept;
    for (auto& s : out) {
      if (audit_seed(method, s.keep, oracle, label, &st.audit_queries)) kept.push_back(std::move(s));
      else ++st.audit_failures;
    }
    out = std::move(kept);
  }
  sort_seeds(out);
  return out;
}

}  // namespace patic
