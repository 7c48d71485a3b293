#pragma once

// Black-box label oracle: backends (external process, mock, in-process
// function), a prediction cache keyed by canonical source, and query counting.

#include <atomic>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "patic/ast.hpp"

namespace patic {

using Label = std::vector<std::string>;

std::string to_string(const Label& label);

struct ScoredLabel {
  Label label;
  double p = 0.0;
  friend bool operator==(const ScoredLabel&, const ScoredLabel&) = default;
};

struct Prediction {
  std::vector<ScoredLabel> top_k;

  const Label& top1() const;
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

nlohmann::json to_json(const Prediction& p);
Prediction prediction_from_json(const nlohmann::json& j);

class OracleBackend {
 public:
  virtual ~OracleBackend() = default;
  // Source is the canonical pretty-printed method.
  virtual Prediction predict(const std::string& source) = 0;
  virtual bool concurrent() const { return false; }
  virtual std::string describe() const = 0;
};

struct QueryRecord {
  std::uint64_t sequence = 0;
  std::string source;
  Label top1;
};

class OracleHandle {
 public:
  explicit OracleHandle(std::unique_ptr<OracleBackend> backend, bool cache_enabled = true);
  ~OracleHandle();
  OracleHandle(const OracleHandle&) = delete;
  OracleHandle& operator=(const OracleHandle&) = delete;

  Prediction predict(const MethodUnit& method);
  Prediction predict_source(const std::string& canonical_source);
  bool top1_equals(const MethodUnit& method, const Label& label);

  // Backend calls made so far (cache misses).
  std::uint64_t query_counter() const { return queries_.load(); }
  std::vector<QueryRecord> query_log() const;
  void clear_log();

  void set_cache_enabled(bool on) { cache_enabled_ = on; }
  bool cache_enabled() const { return cache_enabled_; }
  // Persists predictions as JSON lines under dir; entries already on disk are
  // served without counting as queries.
  void attach_cache_dir(const std::string& dir);

  const OracleBackend& backend() const { return *backend_; }

 private:
  Prediction query_backend(const std::string& source);

  std::unique_ptr<OracleBackend> backend_;
  bool cache_enabled_;
  std::atomic<std::uint64_t> queries_{0};
  mutable std::shared_mutex cache_mutex_;
  std::unordered_map<std::string, Prediction> cache_;
  std::unordered_map<std::string, std::shared_future<Prediction>> in_flight_;
  std::mutex backend_mutex_;
  mutable std::mutex log_mutex_;
  std::vector<QueryRecord> log_;
  std::string cache_file_;
  std::mutex file_mutex_;
};

// ---- backends -------------------------------------------------------------------

class FunctionBackend : public OracleBackend {
 public:
  using Fn = std::function<Prediction(const MethodUnit&)>;
  explicit FunctionBackend(Fn fn, std::string name = "function") : fn_(std::move(fn)), name_(std::move(name)) {}
  Prediction predict(const std::string& source) override;
  bool concurrent() const override { return true; }
  std::string describe() const override { return name_; }

 private:
  Fn fn_;
  std::string name_;
};

std::unique_ptr<OracleHandle> make_function_oracle(FunctionBackend::Fn fn, bool cache_enabled = true);

struct ProcessOptions {
  double timeout_seconds = 30.0;
  int max_restarts = 1;
};

// Child process speaking newline-delimited JSON over stdin/stdout.
class ProcessBackend : public OracleBackend {
 public:
  ProcessBackend(std::vector<std::string> argv, ProcessOptions options = {});
  ~ProcessBackend() override;
  Prediction predict(const std::string& source) override;
  bool concurrent() const override { return concurrent_; }
  std::string describe() const override;
  int top_k() const { return top_k_; }

 private:
  void start();
  void stop();
  std::string read_line();
  void write_line(const std::string& line);

  std::vector<std::string> argv_;
  ProcessOptions options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::uint64_t next_id_ = 1;
  int restarts_ = 0;
  int top_k_ = 1;
  bool concurrent_ = false;
  std::mutex io_mutex_;
};

// ---- monotone mock family -----------------------------------------------------

struct MockRule {
  std::optional<MethodUnit> anchor;  // falls back to the spec anchor
  StatementSet fragment;             // paths into the anchor
  std::optional<std::size_t> budget;  // nullopt: unbounded
  std::size_t fragment_tolerance = 0;
  Label label;
};

struct MockModelSpec {
  std::optional<MethodUnit> anchor;
  std::vector<MockRule> rules;
  Label default_label;

  void validate() const;
  static MockModelSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct MockEvaluation {
  bool fired = false;
  std::size_t rule = 0;
  std::size_t drift = 0;
};

// Whether `rule` fires on `method`, with the drift of the best fragment match.
std::optional<std::size_t> rule_drift(const MockRule& rule, const MethodUnit& anchor, const MethodUnit& method);
MockEvaluation evaluate_mock(const MockModelSpec& spec, const MethodUnit& method);
Prediction mock_predict(const MockModelSpec& spec, const MethodUnit& method);

class MockBackend : public OracleBackend {
 public:
  explicit MockBackend(MockModelSpec spec);
  Prediction predict(const std::string& source) override;
  bool concurrent() const override { return true; }
  std::string describe() const override { return "mock"; }
  const MockModelSpec& spec() const { return spec_; }

 private:
  MockModelSpec spec_;
};

std::unique_ptr<OracleHandle> make_monotone_mock(MockModelSpec spec, bool cache_enabled = true);

// Oracle selector used by the CLI: "mock:<spec.json>" or "exec:<command line>".
std::unique_ptr<OracleHandle> open_oracle(const std::string& selector, const ProcessOptions& options = {});

// Plain preorder list of statement shells, the unit the mock compares.
std::vector<AstNode> shell_sequence(const MethodUnit& method);
std::vector<AstNode> shell_sequence(const MethodUnit& method, const StatementSet& only);

}  // namespace patic
