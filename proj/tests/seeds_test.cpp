#include <gtest/gtest.h>

#include <random>

#include "patic/errors.hpp"
#include "patic/seeds.hpp"
#include "support/instances.hpp"

using namespace patic;

namespace {

const Label kL{"save", "file"};
const char* kThree = "void f(int a) { s1(a); s2(a); s3(a); }";

std::unique_ptr<OracleHandle> requiring(const char* src, std::vector<StatementSet> fragments) {
  MockModelSpec spec;
  spec.anchor = parse_method(src);
  spec.default_label = {"other"};
  for (auto& f : fragments) spec.rules.push_back({std::nullopt, f, std::nullopt, 0, kL});
  return make_monotone_mock(spec);
}

StatementPath top(std::uint32_t i) { return {{0, i}}; }

std::set<StatementSet> keeps(const std::vector<Seed>& seeds) {
  std::set<StatementSet> out;
  for (const auto& s : seeds) out.insert(s.keep);
  return out;
}

std::size_t binom(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(Seeds, SingleRequiredStatement) {
  auto oracle = requiring(kThree, {{top(1)}});
  auto seeds = find_seeds(parse_method(kThree), *oracle, kL);
  ASSERT_EQ(seeds.size(), 1u);
  EXPECT_EQ(seeds[0].keep, (StatementSet{top(1)}));
  EXPECT_EQ(pretty(seeds[0].method_view), "void f(int a) {\n    s2(a);\n}\n");
  EXPECT_EQ(keeps(find_seeds_bruteforce(parse_method(kThree), *oracle, kL)), keeps(seeds));
}

TEST(Seeds, AnyNonEmptyBodyGivesFirstSingleton) {
  auto oracle = make_function_oracle([](const MethodUnit& m) {
    return Prediction{{{m.body.empty() ? Label{"other"} : kL, 1.0}}};
  });
  SeedSearchOptions literal;
  literal.overlapping = false;
  literal.audit = false;
  auto seeds = find_seeds(parse_method(kThree), *oracle, kL, literal);
  // Every singleton is minimal and sufficient; the first found is s1 and the
  // remainder recursion picks up the rest.
  ASSERT_EQ(seeds.size(), 3u);
  EXPECT_EQ(seeds[0].keep, (StatementSet{top(0)}));
  EXPECT_EQ(seeds[0].level, 0u);
  EXPECT_EQ(keeps(seeds), keeps(find_seeds_bruteforce(parse_method(kThree), *oracle, kL)));
}

TEST(Seeds, TwoIndependentSingletonsViaRecursion) {
  auto oracle = requiring(kThree, {{top(0)}, {top(2)}});
  SeedSearchStats stats;
  auto seeds = find_seeds(parse_method(kThree), *oracle, kL, {}, &stats);
  EXPECT_EQ(keeps(seeds), (std::set<StatementSet>{{top(0)}, {top(2)}}));
  EXPECT_EQ(keeps(find_seeds_bruteforce(parse_method(kThree), *oracle, kL)), keeps(seeds));
  ASSERT_GE(stats.levels.size(), 2u);
  EXPECT_EQ(seeds[1].level, 1u);
}

TEST(Seeds, IsAbsentChecksRemainder) {
  auto oracle = requiring(kThree, {{top(1)}});
  MethodUnit m = parse_method(kThree);
  EXPECT_TRUE(is_absent(m, {top(0), top(2)}, *oracle, kL));
  EXPECT_FALSE(is_absent(m, {top(1), top(2)}, *oracle, kL));
  EXPECT_TRUE(is_absent(m, {}, *oracle, kL));
}

TEST(Seeds, BruteForcePairAndCap) {
  const char* four = "void f() { a(); b(); c(); d(); }";
  auto oracle = requiring(four, {{top(0), top(3)}});
  auto seeds = find_seeds_bruteforce(parse_method(four), *oracle, kL);
  ASSERT_EQ(seeds.size(), 1u);
  EXPECT_EQ(seeds[0].keep, (StatementSet{top(0), top(3)}));
  const char* one = "void f() { a(); }";
  auto single = requiring(one, {{top(0)}});
  EXPECT_EQ(find_seeds_bruteforce(parse_method(one), *single, kL).size(), 1u);
  SeedSearchOptions capped;
  capped.bruteforce_cap = 3;
  EXPECT_THROW(find_seeds_bruteforce(parse_method(four), *oracle, kL, capped), CapExceeded);
}

TEST(Seeds, OverlappingSeedsFound) {
  const char* four = "void f() { a(); b(); c(); d(); }";
  auto oracle = requiring(four, {{top(0), top(1)}, {top(1), top(2)}});
  auto seeds = find_seeds(parse_method(four), *oracle, kL);
  EXPECT_EQ(keeps(seeds), (std::set<StatementSet>{{top(0), top(1)}, {top(1), top(2)}}));
  // The remainder recursion on its own stops after the first.
  SeedSearchOptions literal;
  literal.overlapping = false;
  EXPECT_EQ(find_seeds(parse_method(four), *oracle, kL, literal).size(), 1u);
}

TEST(Seeds, PreconditionEnforced) {
  auto oracle = requiring(kThree, {{top(1)}});
  EXPECT_THROW(find_seeds(parse_method("void f(int a) { s1(a); }"), *oracle, kL), NotApplicable);
}

TEST(Seeds, MatchesBruteForceOnRandomMocks) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> size(3, 8);
  for (int i = 0; i < 60; ++i) {
    MethodUnit m = oracle::random_method(rng, size(rng));
    auto spec = oracle::random_fragment_mock(rng, m, kL);
    auto a = make_monotone_mock(spec);
    auto b = make_monotone_mock(spec);
    SeedSearchStats stats;
    auto fast = find_seeds(m, *a, kL, {}, &stats);
    EXPECT_EQ(keeps(fast), keeps(find_seeds_bruteforce(m, *b, kL))) << pretty(m);
    EXPECT_EQ(stats.audit_failures, 0u);
    for (const auto& lv : stats.levels) {
      std::size_t bound = 0;
      for (std::size_t k = 1; k <= lv.largest_seed; ++k) bound += binom(lv.universe, k);
      if (lv.largest_seed > 0) EXPECT_LE(lv.selections, bound);
    }
  }
}

TEST(Seeds, PruningSavesQueries) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    MethodUnit m = oracle::random_method(rng, 6);
    auto spec = oracle::random_fragment_mock(rng, m, kL);
    auto pruned = make_monotone_mock(spec);
    auto full = make_monotone_mock(spec);
    SeedSearchOptions off;
    off.prune = false;
    auto a = find_seeds(m, *pruned, kL);
    auto b = find_seeds(m, *full, kL, off);
    EXPECT_EQ(keeps(a), keeps(b));
    EXPECT_LT(pruned->query_counter(), full->query_counter());
  }
}

TEST(Seeds, DeterministicAndJson) {
  std::mt19937_64 rng(3);
  MethodUnit m = oracle::random_method(rng, 7);
  auto spec = oracle::random_fragment_mock(rng, m, kL);
  auto x = make_monotone_mock(spec);
  auto y = make_monotone_mock(spec);
  auto a = find_seeds(m, *x, kL, {}, nullptr, "m1");
  auto b = find_seeds(m, *y, kL, {}, nullptr, "m1");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_json(a[i]), to_json(b[i]));
  EXPECT_EQ(to_json(a[0])["origin"], "m1");
}
