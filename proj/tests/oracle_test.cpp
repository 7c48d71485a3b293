#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "patic/edit.hpp"
#include "patic/errors.hpp"
#include "patic/oracle.hpp"

using namespace patic;

namespace {

const char* kBody = "void f(int a) { x = a; g(a); y = 2; }";
const Label kSave{"save", "file"};
const Label kOther{"other"};

MockModelSpec needs_second(std::optional<std::size_t> budget) {
  MockModelSpec spec;
  spec.anchor = parse_method(kBody);
  spec.default_label = kOther;
  spec.rules.push_back({std::nullopt, {{{0, 1}}}, budget, 0, kSave});
  return spec;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("patic-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Mock, FragmentPresence) {
  auto oracle = make_monotone_mock(needs_second(std::nullopt));
  EXPECT_EQ(oracle->predict(parse_method(kBody)).top1(), kSave);
  EXPECT_TRUE(oracle->top1_equals(parse_method("void f(int a) { g(a); }"), kSave));
  EXPECT_EQ(oracle->predict(parse_method("void f(int a) { x = a; y = 2; }")).top1(), kOther);
  EXPECT_FALSE(oracle->top1_equals(parse_method("void f(int a) { g(b); }"), kSave));
  EXPECT_EQ(oracle->predict(parse_method("void f(int a) { }")).top1(), kOther);
}

TEST(Mock, BudgetCountsNonFragmentEdits) {
  auto one = make_monotone_mock(needs_second(1));
  EXPECT_TRUE(one->top1_equals(parse_method("void f(int a) { x = a; g(a); y = 3; }"), kSave));
  MethodUnit two_renames = parse_method("void f(int a) { z = a; g(a); y = 3; }");
  EXPECT_FALSE(one->top1_equals(two_renames, kSave));
  EXPECT_EQ(method_distance(parse_method(kBody), two_renames), 2u);

  auto two = make_monotone_mock(needs_second(2));
  MethodUnit three = parse_method("void f(int a) { z = b; g(a); y = 3; }");
  EXPECT_EQ(method_distance(parse_method(kBody), three), 3u);
  EXPECT_FALSE(two->top1_equals(three, kSave));
  EXPECT_TRUE(two->top1_equals(two_renames, kSave));
  // Dropping statements is not drift; adding them is.
  EXPECT_TRUE(two->top1_equals(parse_method("void f(int a) { g(a); }"), kSave));
  EXPECT_FALSE(two->top1_equals(parse_method("void f(int a) { g(a); h(a, a); }"), kSave));
}

TEST(Mock, DriftMatchesEditDistanceOnRenames) {
  MockModelSpec spec = needs_second(std::nullopt);
  std::vector<std::pair<const char*, std::size_t>> cases{
      {"void f(int a) { x = a; g(a); y = 2; }", 0}, {"void f(int a) { x = b; g(a); y = 2; }", 1},
      {"void f(int a) { x = b; g(a); q = 1; }", 3}, {"void f(int c) { x = a; g(a); y = 2; }", 1}};
  for (const auto& [src, d] : cases) {
    auto drift = rule_drift(spec.rules[0], *spec.anchor, parse_method(src));
    ASSERT_TRUE(drift.has_value()) << src;
    EXPECT_EQ(*drift, d) << src;
    EXPECT_EQ(method_distance(*spec.anchor, parse_method(src)), d) << src;
  }
}

TEST(Mock, FirstMatchingRuleWins) {
  MockModelSpec spec = needs_second(std::nullopt);
  spec.rules.insert(spec.rules.begin(), MockRule{std::nullopt, {{{0, 2}}}, std::nullopt, 0, {"first"}});
  auto oracle = make_monotone_mock(spec);
  EXPECT_EQ(oracle->predict(parse_method(kBody)).top1(), (Label{"first"}));
  EXPECT_EQ(oracle->predict(parse_method("void f(int a) { g(a); }")).top1(), kSave);
}

TEST(Mock, NestedFragmentInControlStatement) {
  MockModelSpec spec;
  spec.anchor = parse_method("void f() { if (ok) { save(); } else { fail(); } done(); }");
  spec.default_label = kOther;
  spec.rules.push_back({std::nullopt, {{{0, 0}, {0, 0}}}, std::nullopt, 0, kSave});
  auto oracle = make_monotone_mock(spec);
  EXPECT_TRUE(oracle->top1_equals(*spec.anchor, kSave));
  EXPECT_TRUE(oracle->top1_equals(restrict(*spec.anchor, {{{0, 0}, {0, 0}}}), kSave));
  EXPECT_FALSE(oracle->top1_equals(restrict(*spec.anchor, {{{0, 0}}, {{0, 1}}}), kSave));
}

TEST(Mock, SpecJsonAndErrors) {
  MockModelSpec spec = needs_second(4);
  auto round = MockModelSpec::from_json(spec.to_json());
  EXPECT_EQ(round.to_json(), spec.to_json());
  EXPECT_EQ(spec.to_json()["rules"][0]["fragment"][0], "1");
  EXPECT_THROW(MockModelSpec::from_json(nlohmann::json::object()), SpecError);
  auto bad = spec.to_json();
  bad["rules"][0]["fragment"] = {"7"};
  EXPECT_THROW(MockModelSpec::from_json(bad), SpecError);
  bad["rules"][0]["fragment"] = {"x/y"};
  EXPECT_THROW(MockModelSpec::from_json(bad), SpecError);
  EXPECT_THROW(make_monotone_mock(MockModelSpec{}), SpecError);
}

TEST(Mock, FlipsOnceAlongReceding) {
  // Unit renames on non-fragment statements, each moving further away.
  MockModelSpec spec = needs_second(2);
  auto oracle = make_monotone_mock(spec);
  MethodUnit m = *spec.anchor;
  AstNode t = to_tree(m);
  std::vector<TreePath> sites{{1, 0, 0, 1}, {1, 0, 0, 2}, {1, 2, 0, 1}, {1, 2, 0, 2}};
  std::vector<std::string> labels{"Name:p", "Name:q", "Name:r", "Lit:int:9"};
  std::vector<bool> seen{oracle->top1_equals(m, kSave)};
  std::size_t prev = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    m = patic::apply(EditOp::rename(sites[i], labels[i]), m);
    auto d = method_distance(*spec.anchor, m);
    EXPECT_GT(d, prev);
    prev = d;
    seen.push_back(oracle->top1_equals(m, kSave));
  }
  EXPECT_EQ(seen, (std::vector<bool>{true, true, true, false, false}));
}

TEST(Mock, RandomTrajectoriesFlipAtMostOnce) {
  std::mt19937_64 rng(5);
  MockModelSpec spec;
  spec.anchor = parse_method("int f(int n) { int s = 0; s += n; log(s); if (s > 1) { s = 1; } return s; }");
  spec.default_label = kOther;
  spec.rules.push_back({std::nullopt, {{{0, 2}}}, 3, 0, kSave});
  auto oracle = make_monotone_mock(spec);
  StatementSet frozen{{{0, 2}}};
  for (int trial = 0; trial < 8; ++trial) {
    MethodUnit m = *spec.anchor;
    std::size_t prev = 0;
    int flips = 0;
    bool last = true;
    for (int step = 0; step < 6; ++step) {
      // Keep only edits that strictly increase the distance from the anchor.
      auto cands = enumerate_minimal_valid_edits(m, frozen);
      std::shuffle(cands.begin(), cands.end(), rng);
      bool moved = false;
      for (const auto& c : cands) {
        auto d = method_distance(*spec.anchor, c.method);
        if (d > prev) {
          m = c.method;
          prev = d;
          moved = true;
          break;
        }
      }
      if (!moved) break;
      bool now = oracle->top1_equals(m, kSave);
      if (now != last) ++flips;
      last = now;
    }
    EXPECT_LE(flips, 1);
  }
}

TEST(Handle, CacheCountsDistinctSources) {
  auto oracle = make_monotone_mock(needs_second(std::nullopt));
  MethodUnit a = parse_method(kBody);
  MethodUnit b = parse_method("void f(int a) { g(a); }");
  for (int i = 0; i < 3; ++i) {
    oracle->predict(a);
    oracle->predict(b);
  }
  EXPECT_EQ(oracle->query_counter(), 2u);
  EXPECT_EQ(oracle->query_log().size(), 2u);
  oracle->set_cache_enabled(false);
  oracle->predict(a);
  EXPECT_EQ(oracle->query_counter(), 3u);
}

TEST(Handle, CacheOnOffSameAnswers) {
  auto on = make_monotone_mock(needs_second(1), true);
  auto off = make_monotone_mock(needs_second(1), false);
  std::vector<MethodUnit> seq{parse_method(kBody), parse_method("void f(int a) { g(a); y = 5; x = 1; }"),
                              parse_method(kBody), parse_method("void f(int a) { x = a; y = 2; }")};
  for (int rep = 0; rep < 2; ++rep)
    for (const auto& m : seq) EXPECT_EQ(on->predict(m), off->predict(m));
  EXPECT_LE(on->query_counter(), 3u);
  EXPECT_EQ(off->query_counter(), 8u);
}

TEST(Handle, ConcurrentMissesQueryOnce) {
  std::atomic<int> calls{0};
  auto oracle = make_function_oracle([&](const MethodUnit& m) {
    ++calls;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    return Prediction{{{m.body.empty() ? kOther : kSave, 1.0}}};
  });
  MethodUnit m = parse_method(kBody);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { EXPECT_EQ(oracle->predict(m).top1(), kSave); });
  for (auto& t : threads) t.join();
  EXPECT_EQ(calls.load(), 1);
  EXPECT_EQ(oracle->query_counter(), 1u);
}

TEST(Handle, CacheDirPersists) {
  auto dir = temp_dir("cache");
  MethodUnit m = parse_method(kBody);
  {
    auto oracle = make_monotone_mock(needs_second(std::nullopt));
    oracle->attach_cache_dir(dir.string());
    oracle->predict(m);
    EXPECT_EQ(oracle->query_counter(), 1u);
  }
  auto again = make_monotone_mock(needs_second(std::nullopt));
  again->attach_cache_dir(dir.string());
  EXPECT_EQ(again->predict(m).top1(), kSave);
  EXPECT_EQ(again->query_counter(), 0u);
  std::filesystem::remove_all(dir);
}

TEST(Handle, PredictionJsonValidation) {
  EXPECT_THROW(prediction_from_json(nlohmann::json::array()), ProtocolError);
  EXPECT_THROW(prediction_from_json(nlohmann::json::parse(R"([{"subtokens":["a"],"p":0.2},{"subtokens":["b"],"p":0.5}])")),
               ProtocolError);
  auto p = prediction_from_json(nlohmann::json::parse(R"([{"subtokens":["reverse","array"],"p":0.7}])"));
  EXPECT_EQ(p.top1(), (Label{"reverse", "array"}));
  EXPECT_EQ(to_string(p.top1()), "reverse|array");
}

TEST(Process, WireProtocolRoundTrip) {
  auto dir = temp_dir("proc");
  auto spec_file = dir / "spec.json";
  std::ofstream(spec_file) << needs_second(std::nullopt).to_json().dump();
  auto oracle = open_oracle(std::string("exec:") + PATIC_MOCK_ORACLE + " " + spec_file.string());
  EXPECT_TRUE(oracle->backend().concurrent());
  EXPECT_EQ(oracle->predict(parse_method(kBody)).top1(), kSave);
  auto p = oracle->predict(parse_method("void f(int a) { x = a; }"));
  EXPECT_EQ(p.top1(), kOther);
  auto in_process = open_oracle("mock:" + spec_file.string());
  EXPECT_EQ(in_process->predict(parse_method(kBody)), oracle->predict(parse_method(kBody)));
  std::filesystem::remove_all(dir);
}

TEST(Process, FailuresAreReported) {
  auto dir = temp_dir("fail");
  auto spec_file = dir / "spec.json";
  std::ofstream(spec_file) << needs_second(std::nullopt).to_json().dump();
  auto garbled = open_oracle(std::string("exec:") + PATIC_MOCK_ORACLE + " --garble " + spec_file.string());
  EXPECT_THROW(garbled->predict(parse_method(kBody)), ProtocolError);
  ProcessOptions once{5.0, 0};
  auto crashing = open_oracle(std::string("exec:") + PATIC_MOCK_ORACLE + " --crash-after 1 " + spec_file.string(), once);
  crashing->predict(parse_method(kBody));
  EXPECT_THROW(crashing->predict(parse_method("void f(int a) { g(a); }")), OracleUnavailable);
  ProcessOptions retry{5.0, 1};
  auto restarted = open_oracle(std::string("exec:") + PATIC_MOCK_ORACLE + " --crash-after 1 " + spec_file.string(), retry);
  restarted->predict(parse_method(kBody));
  EXPECT_EQ(restarted->predict(parse_method("void f(int a) { g(a); }")).top1(), kSave);
  EXPECT_THROW(open_oracle("exec:/nonexistent/oracle"), OracleUnavailable);
  EXPECT_THROW(open_oracle("remote:x"), DataError);
  std::filesystem::remove_all(dir);
}
