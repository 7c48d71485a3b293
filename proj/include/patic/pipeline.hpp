#pragma once

// End-to-end orchestration: corpus loading, per-stage JSONL artifacts,
// the full run and the summary report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "patic/augment.hpp"
#include "patic/concretize.hpp"
#include "patic/grammar.hpp"
#include "patic/mutants.hpp"
#include "patic/oracle.hpp"
#include "patic/robustness.hpp"
#include "patic/seeds.hpp"

namespace patic {

struct PipelineConfig {
  std::string corpus;
  std::string split;  // empty: every record
  std::string oracle;
  std::uint64_t rng = 0;
  unsigned jobs = 1;  // never changes outputs
  std::string cache_dir;

  SeedSearchOptions seeds;
  std::size_t mutant_cap = 10000;
  std::size_t concretize_depth = 3;
  std::size_t max_trajectories = 4;
  double sample_rate = 1.0;
  bool shapes = true;  // also concretize seeds under the shape catalog
  std::size_t grammar_depth = 3;
  std::size_t grammar_samples = 20;

  bool attack = true;
  std::vector<std::string> strategies{"patic", "baseline"};
  std::size_t budget = 50;
  std::vector<std::string> exclude;

  bool augment = true;
  std::size_t per_pair = 1;
  std::size_t min_count = 1;
  double min_error_rate = 0.0;
  std::size_t hosts_per_label = 1;

  // Output-relevant settings only: jobs, cache and output paths are left out
  // so artifacts compare equal across machines and directories.
  nlohmann::json to_json() const;
};

// ---- records ------------------------------------------------------------------

struct CorpusRecord {
  std::string id;
  MethodUnit method;
  Label label;
  std::string split;
};

// Throws DataError naming the line and record on malformed input.
std::vector<CorpusRecord> load_corpus(const std::string& path, const std::string& split = "");

// Lines of a JSONL artifact without its header line.
std::vector<nlohmann::json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const nlohmann::json& header, const std::vector<nlohmann::json>& rows);
nlohmann::json artifact_header(const PipelineConfig& config, const std::string& stage);

nlohmann::json to_json(const EvalRow& row);
EvalRow eval_row_from_json(const nlohmann::json& j);
Mutant mutant_from_json(const nlohmann::json& j);

struct ConcretizedMethod {
  std::string origin;
  Label label;
  std::size_t family = 1;  // seed family within the label
  std::string shape;
  StatementSet anchor_paths;
  Concretization concretization;
};

nlohmann::json to_json(const ConcretizedMethod& c);
ConcretizedMethod concretized_from_json(const nlohmann::json& j);

struct GrammarArtifact {
  Label label;
  Cfg grammar;
  std::size_t traces = 0;
  std::size_t shapes = 0;      // distinct control-flow structures
  std::size_t variations = 0;  // distinct verified programs
  std::size_t samples_checked = 0;
  std::size_t samples_kept = 0;
};

nlohmann::json to_json(const GrammarArtifact& g);

// ---- stages ---------------------------------------------------------------------

std::vector<EvalRow> predict_stage(const std::vector<CorpusRecord>& corpus, OracleHandle& oracle, unsigned jobs);
// Seeds per record, explaining the model's own prediction.
std::vector<std::vector<Seed>> seeds_stage(const std::vector<CorpusRecord>& corpus, const std::vector<EvalRow>& predictions,
                                           OracleHandle& oracle, const PipelineConfig& config);
std::vector<std::vector<Mutant>> mutants_stage(const std::vector<CorpusRecord>& corpus,
                                               const std::vector<EvalRow>& predictions,
                                               const std::vector<std::vector<Seed>>& seeds, OracleHandle& oracle,
                                               const PipelineConfig& config);
std::vector<ConcretizedMethod> concretize_stage(const std::vector<CorpusRecord>& corpus,
                                                const std::vector<EvalRow>& predictions,
                                                const std::vector<std::vector<Seed>>& seeds,
                                                const std::vector<std::vector<Mutant>>& mutants, OracleHandle& oracle,
                                                const PipelineConfig& config);
// Oracle may be null: grammars are then emitted unverified.
std::vector<GrammarArtifact> grammar_stage(const std::vector<ConcretizedMethod>& concretized, OracleHandle* oracle,
                                           const PipelineConfig& config);
// Correctly predicted records only.
std::vector<AttackResult> attack_stage(const std::vector<CorpusRecord>& corpus, const std::vector<EvalRow>& predictions,
                                       const std::vector<std::vector<Seed>>& seeds, OracleHandle& oracle,
                                       Strategy strategy, const PipelineConfig& config);
std::vector<AugmentedSample> augment_stage(const std::vector<EvalRow>& eval, const std::vector<Seed>& seeds,
                                           const std::vector<Host>& hosts, const PipelineConfig& config);

// Groups flat seed records by corpus order; throws DataError on unknown origins.
std::vector<std::vector<Seed>> group_seeds(const std::vector<CorpusRecord>& corpus, const std::vector<Seed>& seeds);
std::vector<std::vector<Mutant>> group_mutants(const std::vector<CorpusRecord>& corpus, const std::vector<Mutant>& mutants);

std::string grammar_file_stem(const Label& label);

// Runs every enabled stage into `out_dir`; with `resume`, stages whose
// artifact exists are read back instead of recomputed.
void run_pipeline(const PipelineConfig& config, const std::string& out_dir, bool resume = false);

struct Report {
  std::string text;
  nlohmann::json json;
};

// Throws MissingStage when the seed artifacts are absent.
Report report(const std::string& dir);

}  // namespace patic
