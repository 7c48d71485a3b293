#include <filesystem>
#include <fstream>
#include <map>

#include "patic/errors.hpp"
#include "patic/pipeline.hpp"

namespace patic {

namespace {

constexpr const char* kHeaderKey = "patic_config";

nlohmann::json paths_json(const StatementSet& paths) {
  auto out = nlohmann::json::array();
  for (const auto& p : paths) out.push_back(to_string(p));
  return out;
}

StatementSet paths_from_json(const nlohmann::json& j) {
  StatementSet out;
  for (const auto& p : j) out.insert(parse_path(p.get<std::string>()));
  return out;
}

AnchorRef anchor_from_json(const nlohmann::json& j) {
  AnchorRef a;
  std::string kind = j.at("kind").get<std::string>();
  if (kind != "seed" && kind != "mutant") throw DataError("unknown anchor kind '" + kind + "'");
  a.kind = kind == "seed" ? AnchorRef::Kind::Seed : AnchorRef::Kind::Mutant;
  a.index = j.at("index").get<std::size_t>();
  return a;
}

// Converts library errors from a record parser into DataError.
template <typename F>
auto parse_record(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ") + what + " record: " + e.what());
  } catch (const SyntaxError& e) {
    throw DataError(std::string(what) + " source does not parse: " + e.what());
  } catch (const PathError& e) {
    throw DataError(std::string("bad path in ") + what + " record: " + e.what());
  }
}

}  // namespace

nlohmann::json PipelineConfig::to_json() const {
  return {{"corpus", corpus},
          {"split", split},
          {"oracle", oracle},
          {"rng", rng},
          {"seeds", {{"prune", seeds.prune}, {"overlapping", seeds.overlapping}, {"audit", seeds.audit}}},
          {"mutants", {{"cap", mutant_cap}}},
          {"concretize",
           {{"depth", concretize_depth},
            {"max_trajectories", max_trajectories},
            {"sample_rate", sample_rate},
            {"shapes", shapes}}},
          {"grammar", {{"depth", grammar_depth}, {"samples", grammar_samples}}},
          {"attack", {{"enabled", attack}, {"strategies", strategies}, {"budget", budget}, {"exclude", exclude}}},
          {"augment",
           {{"enabled", augment},
            {"per_pair", per_pair},
            {"min_count", min_count},
            {"min_error_rate", min_error_rate},
            {"hosts_per_label", hosts_per_label}}}};
}

std::vector<CorpusRecord> load_corpus(const std::string& path, const std::string& split) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read corpus " + path);
  std::vector<CorpusRecord> out;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = path + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": not JSON: " + e.what());
    }
    if (j.is_object() && j.contains(kHeaderKey)) continue;
    CorpusRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.label = j.at("label").get<Label>();
      r.split = j.value("split", std::string());
      if (r.label.empty()) throw DataError("empty label");
      r.method = parse_method(j.at("source").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": malformed corpus record " + (r.id.empty() ? "" : "'" + r.id + "' ") + e.what());
    } catch (const SyntaxError& e) {
      throw DataError(where + ": record '" + r.id + "' does not parse: " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": record '" + r.id + "': " + e.what());
    }
    if (seen.count(r.id)) throw DataError(where + ": duplicate record id '" + r.id + "'");
    seen[r.id] = lineno;
    if (split.empty() || r.split == split) out.push_back(std::move(r));
  }
  return out;
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": not JSON: " + e.what());
    }
    if (j.is_object() && j.contains(kHeaderKey)) continue;
    out.push_back(std::move(j));
  }
  return out;
}

void write_jsonl(const std::string& path, const nlohmann::json& header, const std::vector<nlohmann::json>& rows) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  if (!header.is_null()) out << header.dump() << "\n";
  for (const auto& r : rows) out << r.dump() << "\n";
  if (!out) throw DataError("failed writing " + path);
}

nlohmann::json artifact_header(const PipelineConfig& config, const std::string& stage) {
  return {{kHeaderKey, config.to_json()}, {"stage", stage}};
}

nlohmann::json to_json(const EvalRow& row) {
  return {{"id", row.id}, {"label", row.gold}, {"predicted", row.predicted}, {"correct", row.gold == row.predicted}};
}

EvalRow eval_row_from_json(const nlohmann::json& j) {
  return parse_record("prediction", [&] {
    return EvalRow{j.at("id").get<std::string>(), j.at("label").get<Label>(), j.at("predicted").get<Label>()};
  });
}

Mutant mutant_from_json(const nlohmann::json& j) {
  return parse_record("mutant", [&] {
    Mutant m;
    m.origin = j.at("origin").get<std::string>();
    m.seed_index = j.at("seed").get<std::size_t>();
    m.keep = paths_from_json(j.at("paths"));
    m.variant = parse_method(j.at("variant").get<std::string>());
    m.in_context = parse_method(j.at("source").get<std::string>());
    m.script = edit_script_from_json(j.at("script"));
    m.round = j.value("round", std::size_t{0});
    m.validated_in_context = j.value("validated_in_context", true);
    std::string s = j.value("strength", std::string("ordinary"));
    m.strength = s == "weakest" ? Strength::Weakest : s == "strongest" ? Strength::Strongest : Strength::Ordinary;
    return m;
  });
}

nlohmann::json to_json(const ConcretizedMethod& c) {
  nlohmann::json j = to_json(c.concretization);
  j["origin"] = c.origin;
  j["label"] = c.label;
  j["family"] = c.family;
  j["shape"] = c.shape;
  j["anchor_paths"] = paths_json(c.anchor_paths);
  return j;
}

ConcretizedMethod concretized_from_json(const nlohmann::json& j) {
  return parse_record("concretization", [&] {
    ConcretizedMethod c;
    c.origin = j.at("origin").get<std::string>();
    c.label = j.at("label").get<Label>();
    c.family = j.at("family").get<std::size_t>();
    c.shape = j.at("shape").get<std::string>();
    c.anchor_paths = paths_from_json(j.at("anchor_paths"));
    c.concretization.method = parse_method(j.at("source").get<std::string>());
    c.concretization.anchor = anchor_from_json(j.at("anchor"));
    c.concretization.interval = j.at("interval").get<std::size_t>();
    c.concretization.position = j.at("position").get<std::size_t>();
    c.concretization.verified = j.at("verified").get<bool>();
    return c;
  });
}

nlohmann::json to_json(const GrammarArtifact& g) {
  return {{"label", g.label},
          {"traces", g.traces},
          {"shapes", g.shapes},
          {"variations", g.variations},
          {"samples_checked", g.samples_checked},
          {"samples_kept", g.samples_kept},
          {"grammar", to_json(g.grammar)}};
}

std::vector<std::vector<Seed>> group_seeds(const std::vector<CorpusRecord>& corpus, const std::vector<Seed>& seeds) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus[i].id] = i;
  std::vector<std::vector<Seed>> out(corpus.size());
  for (const auto& s : seeds) {
    auto it = index.find(s.origin);
    if (it == index.end()) throw DataError("seed refers to unknown record '" + s.origin + "'");
    const MethodUnit& m = corpus[it->second].method;
    for (const auto& p : s.keep)
      if (!contains_path(m, p)) throw DataError("seed path " + to_string(p) + " is not in record '" + s.origin + "'");
    out[it->second].push_back(s);
  }
  return out;
}

std::vector<std::vector<Mutant>> group_mutants(const std::vector<CorpusRecord>& corpus,
                                               const std::vector<Mutant>& mutants) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus[i].id] = i;
  std::vector<std::vector<Mutant>> out(corpus.size());
  for (const auto& m : mutants) {
    auto it = index.find(m.origin);
    if (it == index.end()) throw DataError("mutant refers to unknown record '" + m.origin + "'");
    out[it->second].push_back(m);
  }
  return out;
}

std::string grammar_file_stem(const Label& label) {
  std::string out;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (i) out += '_';
    for (char c : label[i]) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '-';
  }
  return out.empty() ? "unlabeled" : out;
}

}  // namespace patic
