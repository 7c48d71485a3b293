#include <filesystem>
#include <fstream>

#include "patic/errors.hpp"
#include "patic/oracle.hpp"

namespace patic {

std::string to_string(const Label& label) {
  std::string out;
  for (std::size_t i = 0; i < label.size(); ++i) out += (i ? "|" : "") + label[i];
  return out;
}

const Label& Prediction::top1() const {
  if (top_k.empty()) throw ProtocolError("empty prediction");
  return top_k.front().label;
}

nlohmann::json to_json(const Prediction& p) {
  auto arr = nlohmann::json::array();
  for (const auto& s : p.top_k) arr.push_back({{"subtokens", s.label}, {"p", s.p}});
  return arr;
}

Prediction prediction_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ProtocolError("predictions must be a non-empty array");
  Prediction out;
  double prev = 1.0;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("subtokens") || !e.contains("p") || !e["subtokens"].is_array() ||
        !e["p"].is_number())
      throw ProtocolError("malformed prediction entry " + e.dump());
    ScoredLabel s;
    for (const auto& t : e["subtokens"]) {
      if (!t.is_string()) throw ProtocolError("subtoken must be a string");
      s.label.push_back(t.get<std::string>());
    }
    s.p = e["p"].get<double>();
    if (s.label.empty()) throw ProtocolError("empty label in prediction");
    if (s.p < 0.0 || s.p > 1.0 || s.p > prev + 1e-12) throw ProtocolError("probabilities must be non-increasing in [0,1]");
    prev = s.p;
    out.top_k.push_back(std::move(s));
  }
  return out;
}

// ---- handle -------------------------------------------------------------------

OracleHandle::OracleHandle(std::unique_ptr<OracleBackend> backend, bool cache_enabled)
    : backend_(std::move(backend)), cache_enabled_(cache_enabled) {}

OracleHandle::~OracleHandle() = default;

Prediction OracleHandle::query_backend(const std::string& source) {
  Prediction p;
  if (backend_->concurrent()) {
    p = backend_->predict(source);
  } else {
    std::lock_guard lock(backend_mutex_);
    p = backend_->predict(source);
  }
  std::uint64_t seq = ++queries_;
  std::lock_guard lock(log_mutex_);
  log_.push_back({seq, source, p.top1()});
  return p;
}

Prediction OracleHandle::predict(const MethodUnit& method) { return predict_source(pretty(method)); }

Prediction OracleHandle::predict_source(const std::string& source) {
  if (!cache_enabled_) return query_backend(source);
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(source); it != cache_.end()) return it->second;
  }
  std::promise<Prediction> promise;
  std::shared_future<Prediction> pending;
  bool owner = false;
  {
    std::unique_lock lock(cache_mutex_);
    if (auto it = cache_.find(source); it != cache_.end()) return it->second;
    if (auto it = in_flight_.find(source); it != in_flight_.end()) {
      pending = it->second;
    } else {
      pending = promise.get_future().share();
      in_flight_.emplace(source, pending);
      owner = true;
    }
  }
  if (!owner) return pending.get();
  try {
    Prediction p = query_backend(source);
    {
      std::unique_lock lock(cache_mutex_);
      cache_.emplace(source, p);
      in_flight_.erase(source);
    }
    if (!cache_file_.empty()) {
      std::lock_guard lock(file_mutex_);
      std::ofstream out(cache_file_, std::ios::app);
      out << nlohmann::json{{"source", source}, {"predictions", to_json(p)}}.dump() << "\n";
    }
    promise.set_value(p);
    return p;
  } catch (...) {
    {
      std::unique_lock lock(cache_mutex_);
      in_flight_.erase(source);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

bool OracleHandle::top1_equals(const MethodUnit& method, const Label& label) { return predict(method).top1() == label; }

std::vector<QueryRecord> OracleHandle::query_log() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

void OracleHandle::clear_log() {
  std::lock_guard lock(log_mutex_);
  log_.clear();
}

void OracleHandle::attach_cache_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
  // One file per backend description keeps caches of different models apart.
  std::string name = backend_->describe();
  std::string safe;
  for (char c : name) safe += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  cache_file_ = (std::filesystem::path(dir) / ("oracle-" + safe + ".jsonl")).string();
  std::ifstream in(cache_file_);
  std::string line;
  std::unique_lock lock(cache_mutex_);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      cache_.emplace(j.at("source").get<std::string>(), prediction_from_json(j.at("predictions")));
    } catch (const std::exception& e) {
      throw DataError("corrupt oracle cache " + cache_file_ + ": " + e.what());
    }
  }
}

// ---- function backend ---------------------------------------------------------

Prediction FunctionBackend::predict(const std::string& source) { return fn_(parse_method(source)); }

std::unique_ptr<OracleHandle> make_function_oracle(FunctionBackend::Fn fn, bool cache_enabled) {
  return std::make_unique<OracleHandle>(std::make_unique<FunctionBackend>(std::move(fn)), cache_enabled);
}

// ---- selector -----------------------------------------------------------------

namespace {

std::vector<std::string> split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quote = false;
  char quote = 0;
  bool has = false;
  for (char c : cmd) {
    if (in_quote) {
      if (c == quote) in_quote = false;
      else cur += c;
    } else if (c == '"' || c == '\'') {
      in_quote = true;
      quote = c;
      has = true;
    } else if (c == ' ' || c == '\t') {
      if (has) out.push_back(cur);
      cur.clear();
      has = false;
    } else {
      cur += c;
      has = true;
    }
  }
  if (in_quote) throw DataError("unbalanced quote in oracle command");
  if (has) out.push_back(cur);
  return out;
}

}  // namespace

std::unique_ptr<OracleHandle> open_oracle(const std::string& selector, const ProcessOptions& options) {
  if (selector.rfind("mock:", 0) == 0) {
    std::string path = selector.substr(5);
    std::ifstream in(path);
    if (!in) throw DataError("cannot read mock spec " + path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("mock spec " + path + " is not JSON: " + e.what());
    }
    return make_monotone_mock(MockModelSpec::from_json(j));
  }
  if (selector.rfind("exec:", 0) == 0) {
    auto argv = split_command(selector.substr(5));
    if (argv.empty()) throw DataError("empty oracle command");
    return std::make_unique<OracleHandle>(std::make_unique<ProcessBackend>(std::move(argv), options));
  }
  throw DataError("oracle selector must be mock:<spec.json> or exec:<command>, got '" + selector + "'");
}

}  // namespace patic
