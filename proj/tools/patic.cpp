#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "patic/errors.hpp"
#include "patic/pipeline.hpp"

using namespace patic;

namespace {

constexpr int kUsage = 1;
constexpr int kOracleFailure = 2;
constexpr int kDataError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::unique_ptr<OracleHandle> connect(const PipelineConfig& c) {
  if (c.oracle.empty()) throw UsageError("--oracle is required for this subcommand");
  auto o = open_oracle(c.oracle);
  if (!c.cache_dir.empty()) o->attach_cache_dir(c.cache_dir);
  return o;
}

std::vector<Seed> read_seeds(const std::string& path) {
  std::vector<Seed> out;
  for (const auto& j : read_jsonl(path)) out.push_back(seed_from_json(j));
  return out;
}

template <typename T, typename F>
std::vector<nlohmann::json> rows_of(const std::vector<T>& items, F&& to) {
  std::vector<nlohmann::json> out;
  for (const auto& x : items) out.push_back(to(x));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patic: explain, attack and augment black-box code summarization models"};
  app.require_subcommand(1);
  PipelineConfig cfg;
  app.add_option("--oracle", cfg.oracle, "mock:<spec.json> or exec:<command>");
  app.add_option("--rng", cfg.rng, "seed for every random choice")->default_val(0);
  app.add_option("--jobs", cfg.jobs, "worker threads")->default_val(1)->check(CLI::PositiveNumber);
  app.add_option("--cache-dir", cfg.cache_dir, "persistent oracle answer cache");

  std::string corpus, out, seeds_path, mutants_path, in_path, predictions_path, dir, strategy = "patic";
  std::string eval_path, hosts_path;
  bool no_prune = false, no_audit = false, no_overlap = false, no_shapes = false, resume = false;
  bool no_attack = false, no_augment = false, as_json = false, check_hosts = false;

  auto* seeds_cmd = app.add_subcommand("seeds", "find seeds of every corpus method");
  seeds_cmd->add_option("--corpus", corpus)->required();
  seeds_cmd->add_option("--out", out)->required();
  seeds_cmd->add_option("--predictions", predictions_path, "also write the model's predictions here");
  seeds_cmd->add_option("--split", cfg.split);
  seeds_cmd->add_flag("--no-prune", no_prune);
  seeds_cmd->add_flag("--no-audit", no_audit);
  seeds_cmd->add_flag("--no-overlapping", no_overlap);

  auto* mutants_cmd = app.add_subcommand("mutants", "mutate seeds under label preservation");
  mutants_cmd->add_option("--corpus", corpus)->required();
  mutants_cmd->add_option("--seeds", seeds_path)->required();
  mutants_cmd->add_option("--out", out)->required();
  mutants_cmd->add_option("--split", cfg.split);
  mutants_cmd->add_option("--cap", cfg.mutant_cap)->default_val(10000);

  auto* conc_cmd = app.add_subcommand("concretize", "grow seeds and mutants back into verified methods");
  conc_cmd->add_option("--corpus", corpus)->required();
  conc_cmd->add_option("--seeds", seeds_path)->required();
  conc_cmd->add_option("--mutants", mutants_path);
  conc_cmd->add_option("--out", out)->required();
  conc_cmd->add_option("--split", cfg.split);
  conc_cmd->add_option("--depth", cfg.concretize_depth)->default_val(3);
  conc_cmd->add_option("--trajectories", cfg.max_trajectories)->default_val(4);
  conc_cmd->add_option("--sample-rate", cfg.sample_rate)->default_val(1.0)->check(CLI::Range(0.0, 1.0));
  conc_cmd->add_flag("--no-shapes", no_shapes);

  auto* gram_cmd = app.add_subcommand("grammar", "infer one grammar per label from concretizations");
  gram_cmd->add_option("--in", in_path)->required();
  gram_cmd->add_option("--out-dir", dir)->required();
  gram_cmd->add_option("--depth", cfg.grammar_depth)->default_val(3)->check(CLI::PositiveNumber);
  gram_cmd->add_option("--samples", cfg.grammar_samples)->default_val(20);

  auto* attack_cmd = app.add_subcommand("attack", "search adversarial examples");
  attack_cmd->add_option("--corpus", corpus)->required();
  attack_cmd->add_option("--seeds", seeds_path)->required();
  attack_cmd->add_option("--out", out)->required();
  attack_cmd->add_option("--split", cfg.split);
  attack_cmd->add_option("--strategy", strategy)->check(CLI::IsMember({"patic", "baseline"}));
  attack_cmd->add_option("--budget", cfg.budget)->default_val(50);
  attack_cmd->add_option("--exclude", cfg.exclude, "transformations to leave out");

  auto* score_cmd = app.add_subcommand("score", "summarize attack results");
  score_cmd->add_option("--in", in_path)->required();

  auto* aug_cmd = app.add_subcommand("augment", "inject seeds of mis-predicted methods into hosts");
  aug_cmd->add_option("--eval", eval_path, "predictions of the evaluated methods")->required();
  aug_cmd->add_option("--seeds", seeds_path)->required();
  aug_cmd->add_option("--hosts", hosts_path, "corpus of host methods")->required();
  aug_cmd->add_option("--out", out)->required();
  aug_cmd->add_option("--per-pair", cfg.per_pair)->default_val(1);
  aug_cmd->add_option("--min-count", cfg.min_count)->default_val(1);
  aug_cmd->add_option("--min-error-rate", cfg.min_error_rate)->default_val(0.0)->check(CLI::Range(0.0, 1.0));
  aug_cmd->add_option("--hosts-per-label", cfg.hosts_per_label)->default_val(1);
  aug_cmd->add_flag("--check-hosts", check_hosts, "keep only hosts the oracle predicts correctly");

  auto* run_cmd = app.add_subcommand("run", "run every stage into an artifact directory");
  run_cmd->add_option("--corpus", corpus)->required();
  run_cmd->add_option("--out-dir", dir)->required();
  run_cmd->add_option("--split", cfg.split);
  run_cmd->add_flag("--resume", resume, "reuse stage artifacts already present");
  run_cmd->add_option("--cap", cfg.mutant_cap)->default_val(10000);
  run_cmd->add_option("--depth", cfg.concretize_depth)->default_val(3);
  run_cmd->add_option("--trajectories", cfg.max_trajectories)->default_val(4);
  run_cmd->add_option("--sample-rate", cfg.sample_rate)->default_val(1.0)->check(CLI::Range(0.0, 1.0));
  run_cmd->add_flag("--no-shapes", no_shapes);
  run_cmd->add_option("--grammar-depth", cfg.grammar_depth)->default_val(3)->check(CLI::PositiveNumber);
  run_cmd->add_option("--samples", cfg.grammar_samples)->default_val(20);
  run_cmd->add_option("--budget", cfg.budget)->default_val(50);
  run_cmd->add_option("--exclude", cfg.exclude);
  run_cmd->add_flag("--no-attack", no_attack);
  run_cmd->add_flag("--no-augment", no_augment);
  run_cmd->add_option("--per-pair", cfg.per_pair)->default_val(1);

  auto* report_cmd = app.add_subcommand("report", "summarize an artifact directory");
  report_cmd->add_option("--dir", dir)->required();
  report_cmd->add_flag("--json", as_json, "print the JSON summary instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    cfg.corpus = corpus;
    cfg.seeds.prune = !no_prune;
    cfg.seeds.audit = !no_audit;
    cfg.seeds.overlapping = !no_overlap;
    cfg.shapes = !no_shapes;
    cfg.attack = !no_attack;
    cfg.augment = !no_augment;

    if (*seeds_cmd) {
      auto oracle = connect(cfg);
      auto records = load_corpus(corpus, cfg.split);
      auto preds = predict_stage(records, *oracle, cfg.jobs);
      auto seeds = seeds_stage(records, preds, *oracle, cfg);
      std::vector<nlohmann::json> rows;
      for (std::size_t i = 0; i < records.size(); ++i)
        for (const auto& s : seeds[i]) {
          auto j = to_json(s);
          j["method_tokens"] = body_token_count(records[i].method);
          j["seed_tokens"] = body_token_count(s.method_view);
          rows.push_back(std::move(j));
        }
      write_jsonl(out, artifact_header(cfg, "seeds"), rows);
      if (!predictions_path.empty())
        write_jsonl(predictions_path, artifact_header(cfg, "predict"),
                    rows_of(preds, [](const EvalRow& r) { return to_json(r); }));
    } else if (*mutants_cmd) {
      auto oracle = connect(cfg);
      auto records = load_corpus(corpus, cfg.split);
      auto preds = predict_stage(records, *oracle, cfg.jobs);
      auto mutants = mutants_stage(records, preds, group_seeds(records, read_seeds(seeds_path)), *oracle, cfg);
      std::vector<nlohmann::json> rows;
      for (const auto& per : mutants)
        for (const auto& m : per) rows.push_back(to_json(m));
      write_jsonl(out, artifact_header(cfg, "mutants"), rows);
    } else if (*conc_cmd) {
      auto oracle = connect(cfg);
      auto records = load_corpus(corpus, cfg.split);
      auto preds = predict_stage(records, *oracle, cfg.jobs);
      std::vector<Mutant> flat;
      if (!mutants_path.empty())
        for (const auto& j : read_jsonl(mutants_path)) flat.push_back(mutant_from_json(j));
      auto result = concretize_stage(records, preds, group_seeds(records, read_seeds(seeds_path)),
                                     group_mutants(records, flat), *oracle, cfg);
      write_jsonl(out, artifact_header(cfg, "concretize"),
                  rows_of(result, [](const ConcretizedMethod& c) { return to_json(c); }));
    } else if (*gram_cmd) {
      std::vector<ConcretizedMethod> items;
      for (const auto& j : read_jsonl(in_path)) items.push_back(concretized_from_json(j));
      std::unique_ptr<OracleHandle> oracle;
      if (!cfg.oracle.empty()) oracle = connect(cfg);
      auto grammars = grammar_stage(items, oracle.get(), cfg);
      std::filesystem::create_directories(dir);
      for (const auto& g : grammars) {
        auto stem = std::filesystem::path(dir) / grammar_file_stem(g.label);
        std::ofstream(stem.string() + ".bnf") << "// " << artifact_header(cfg, "grammar").dump() << "\n"
                                              << to_bnf(g.grammar);
        std::ofstream(stem.string() + ".json") << to_json(g.grammar).dump(2) << "\n";
        std::cout << to_string(g.label) << ": " << g.grammar.rules.size() << " rules from " << g.traces
                  << " programs\n";
      }
    } else if (*attack_cmd) {
      auto oracle = connect(cfg);
      auto records = load_corpus(corpus, cfg.split);
      auto preds = predict_stage(records, *oracle, cfg.jobs);
      cfg.strategies = {strategy};
      auto results = attack_stage(records, preds, group_seeds(records, read_seeds(seeds_path)), *oracle,
                                  strategy_from_name(strategy), cfg);
      write_jsonl(out, artifact_header(cfg, "attack-" + strategy),
                  rows_of(results, [](const AttackResult& r) { return to_json(r); }));
    } else if (*score_cmd) {
      std::vector<AttackResult> results;
      for (const auto& j : read_jsonl(in_path)) results.push_back(attack_result_from_json(j));
      RobustnessReport r = score(results);
      auto show = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("n/a"); };
      std::cout << "methods: " << r.methods << "\nsuccesses: " << r.successes
                << "\nmean distance: " << show(r.mean_distance) << "\nmean attempts: " << show(r.mean_attempts)
                << "\nfailure percentage: " << r.failure_percentage << "\n"
                << to_json(r).dump() << "\n";
    } else if (*aug_cmd) {
      std::vector<EvalRow> eval;
      for (const auto& j : read_jsonl(eval_path)) eval.push_back(eval_row_from_json(j));
      auto host_records = load_corpus(hosts_path);
      std::vector<Host> hosts;
      std::unique_ptr<OracleHandle> oracle;
      if (check_hosts) oracle = connect(cfg);
      for (const auto& r : host_records) {
        if (oracle && !oracle->top1_equals(r.method, r.label)) continue;
        hosts.push_back({r.id, r.method, r.label});
      }
      auto samples = augment_stage(eval, read_seeds(seeds_path), hosts, cfg);
      write_jsonl(out, artifact_header(cfg, "augment"),
                  rows_of(samples, [](const AugmentedSample& s) { return to_json(s); }));
      std::cout << samples.size() << " samples\n";
    } else if (*run_cmd) {
      if (cfg.oracle.empty()) throw UsageError("--oracle is required for this subcommand");
      run_pipeline(cfg, dir, resume);
    } else if (*report_cmd) {
      Report r = report(dir);
      std::cout << (as_json ? r.json.dump(2) + "\n" : r.text);
    }
  } catch (const UsageError& e) {
    std::cerr << "patic: " << e.what() << "\n";
    return kUsage;
  } catch (const OracleUnavailable& e) {
    std::cerr << "patic: oracle failure: " << e.what() << "\n";
    return kOracleFailure;
  } catch (const ProtocolError& e) {
    std::cerr << "patic: oracle failure: " << e.what() << "\n";
    return kOracleFailure;
  } catch (const std::exception& e) {
    std::cerr << "patic: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
