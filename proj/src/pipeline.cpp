#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "patic/errors.hpp"
#include "patic/parallel.hpp"
#include "patic/pipeline.hpp"

namespace patic {

namespace {

namespace fs = std::filesystem;

// Re-raises an error with the stage and record prefixed, keeping the
// categories the exit codes depend on.
template <typename F>
void in_context(const std::string& stage, const std::string& id, F&& f) {
  std::string where = "stage " + stage + (id.empty() ? "" : ", record '" + id + "'") + ": ";
  try {
    f();
  } catch (const OracleUnavailable& e) {
    throw OracleUnavailable(where + e.what());
  } catch (const ProtocolError& e) {
    throw ProtocolError(where + e.what());
  } catch (const NotApplicable& e) {
    throw NotApplicable(where + e.what());
  } catch (const Error& e) {
    throw DataError(where + e.what());
  }
}

void check_aligned(const std::vector<CorpusRecord>& corpus, const std::vector<EvalRow>& predictions) {
  if (corpus.size() != predictions.size()) throw DataError("predictions do not match the corpus");
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (corpus[i].id != predictions[i].id)
      throw DataError("prediction for '" + predictions[i].id + "' is out of order with corpus record '" +
                      corpus[i].id + "'");
}

std::vector<ApiSubstitution> api_table() {
  std::string path = std::string(PATIC_DATA_DIR) + "/api_substitutions.json";
  if (!fs::exists(path)) return builtin_api_substitutions();
  return load_api_substitutions(path);
}

}  // namespace

std::vector<EvalRow> predict_stage(const std::vector<CorpusRecord>& corpus, OracleHandle& oracle, unsigned jobs) {
  std::vector<EvalRow> out(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    in_context("predict", corpus[i].id, [&] {
      out[i] = EvalRow{corpus[i].id, corpus[i].label, oracle.predict(corpus[i].method).top1()};
    });
  });
  return out;
}

std::vector<std::vector<Seed>> seeds_stage(const std::vector<CorpusRecord>& corpus, const std::vector<EvalRow>& predictions,
                                           OracleHandle& oracle, const PipelineConfig& config) {
  check_aligned(corpus, predictions);
  std::vector<std::vector<Seed>> out(corpus.size());
  parallel_for(corpus.size(), config.jobs, [&](std::size_t i) {
    in_context("seeds", corpus[i].id, [&] {
      out[i] = find_seeds(corpus[i].method, oracle, predictions[i].predicted, config.seeds, nullptr, corpus[i].id);
    });
  });
  return out;
}

std::vector<std::vector<Mutant>> mutants_stage(const std::vector<CorpusRecord>& corpus,
                                               const std::vector<EvalRow>& predictions,
                                               const std::vector<std::vector<Seed>>& seeds, OracleHandle& oracle,
                                               const PipelineConfig& config) {
  check_aligned(corpus, predictions);
  std::vector<std::vector<Mutant>> out(corpus.size());
  MutantSearchOptions opts;
  opts.cap = config.mutant_cap;
  parallel_for(corpus.size(), config.jobs, [&](std::size_t i) {
    if (seeds[i].empty()) return;
    in_context("mutants", corpus[i].id, [&] {
      out[i] = find_mutants(corpus[i].method, oracle, predictions[i].predicted, seeds[i], opts);
    });
  });
  return out;
}

std::vector<ConcretizedMethod> concretize_stage(const std::vector<CorpusRecord>& corpus,
                                                const std::vector<EvalRow>& predictions,
                                                const std::vector<std::vector<Seed>>& seeds,
                                                const std::vector<std::vector<Mutant>>& mutants, OracleHandle& oracle,
                                                const PipelineConfig& config) {
  check_aligned(corpus, predictions);
  // Seed families are numbered per label in corpus order.
  std::vector<std::size_t> first_family(corpus.size(), 1);
  std::map<Label, std::size_t> families;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::size_t& next = families[predictions[i].predicted];
    first_family[i] = next + 1;
    next += seeds[i].size();
  }
  ConcretizeConfig cfg;
  cfg.depth = config.concretize_depth;
  cfg.max_trajectories = config.max_trajectories;
  cfg.sample_rate = config.sample_rate;
  cfg.rng_seed = config.rng;
  std::vector<std::vector<ConcretizedMethod>> slots(corpus.size());
  parallel_for(corpus.size(), config.jobs, [&](std::size_t i) {
    if (seeds[i].empty()) return;
    in_context("concretize", corpus[i].id, [&] {
      const MethodUnit& m = corpus[i].method;
      const Label& label = predictions[i].predicted;
      std::vector<Interval> intervals;
      for (std::size_t k = 0; k < seeds[i].size(); ++k) {
        for (auto& iv : concretize_seed(m, seeds[i][k], k, oracle, label, cfg)) intervals.push_back(std::move(iv));
        if (config.shapes) {
          AnchorRef ref{AnchorRef::Kind::Seed, k};
          for (auto& iv : concretize_with_shapes(m, seeds[i][k].keep, ref, oracle, label, shape_catalog(), cfg))
            intervals.push_back(std::move(iv));
        }
      }
      for (std::size_t j = 0; j < mutants[i].size(); ++j)
        for (auto& iv : concretize_mutant(mutants[i][j], j, oracle, label, cfg)) intervals.push_back(std::move(iv));
      std::set<std::string> seen;
      for (auto& c : verify_all(intervals, oracle, label, config.sample_rate, config.rng)) {
        if (!seen.insert(pretty(c.method)).second) continue;
        const Interval& iv = intervals[c.interval];
        std::size_t seed_index = iv.anchor.kind == AnchorRef::Kind::Seed ? iv.anchor.index
                                                                         : mutants[i][iv.anchor.index].seed_index;
        ConcretizedMethod out;
        out.origin = corpus[i].id;
        out.label = label;
        out.family = first_family[i] + seed_index;
        out.shape = iv.shape;
        out.anchor_paths = iv.anchor_paths;
        out.concretization = std::move(c);
        slots[i].push_back(std::move(out));
      }
    });
  });
  std::vector<ConcretizedMethod> out;
  for (auto& s : slots)
    for (auto& c : s) out.push_back(std::move(c));
  return out;
}

std::vector<GrammarArtifact> grammar_stage(const std::vector<ConcretizedMethod>& concretized, OracleHandle* oracle,
                                           const PipelineConfig& config) {
  std::map<Label, std::vector<const ConcretizedMethod*>> by_label;
  for (const auto& c : concretized) by_label[c.label].push_back(&c);
  std::vector<GrammarArtifact> out;
  for (const auto& [label, members] : by_label) {
    in_context("grammar", to_string(label), [&] {
      GrammarArtifact g;
      g.label = label;
      std::vector<DerivationTrace> traces;
      std::set<std::string> shapes, sources;
      for (const auto* c : members) {
        traces.push_back(extract_trace(c->concretization.method, SeedAnchor{c->family, c->anchor_paths}));
        shapes.insert(c->shape);
        sources.insert(pretty(c->concretization.method));
      }
      g.grammar = union_grammar(traces);
      validate(g.grammar);
      g.traces = traces.size();
      g.shapes = shapes.size();
      g.variations = sources.size();
      if (oracle && config.grammar_samples > 0) {
        std::vector<MethodUnit> samples;
        for (std::size_t n = config.grammar_samples; n > 0 && samples.empty(); n /= 2) {
          try {
            samples = sample(g.grammar, config.grammar_depth, n, config.rng);
          } catch (const Exhausted&) {
          }
        }
        g.samples_checked = samples.size();
        for (const auto& s : samples) g.samples_kept += oracle->top1_equals(s, label);
        if (g.samples_checked > 0 && g.samples_kept == g.samples_checked) g.grammar.verified_depth = config.grammar_depth;
      }
      out.push_back(std::move(g));
    });
  }
  return out;
}

std::vector<AttackResult> attack_stage(const std::vector<CorpusRecord>& corpus, const std::vector<EvalRow>& predictions,
                                       const std::vector<std::vector<Seed>>& seeds, OracleHandle& oracle,
                                       Strategy strategy, const PipelineConfig& config) {
  check_aligned(corpus, predictions);
  AttackOptions opts;
  opts.strategy = strategy;
  opts.budget = config.budget;
  opts.rng_seed = config.rng;
  opts.exclude = config.exclude;
  opts.transforms.api_table = api_table();
  std::vector<std::optional<AttackResult>> slots(corpus.size());
  parallel_for(corpus.size(), config.jobs, [&](std::size_t i) {
    if (predictions[i].predicted != corpus[i].label) return;
    in_context("attack", corpus[i].id, [&] {
      std::vector<StatementSet> keeps;
      for (const auto& s : seeds[i]) keeps.push_back(s.keep);
      slots[i] = attack(corpus[i].method, oracle, corpus[i].label, keeps, opts, corpus[i].id);
    });
  });
  std::vector<AttackResult> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

std::vector<AugmentedSample> augment_stage(const std::vector<EvalRow>& eval, const std::vector<Seed>& seeds,
                                           const std::vector<Host>& hosts, const PipelineConfig& config) {
  std::set<Label> targets;
  for (auto& l : select_targets(eval, config.min_count, config.min_error_rate)) targets.insert(l);
  std::set<std::string> origins;
  for (const auto& r : eval)
    if (r.predicted != r.gold && targets.count(r.gold)) origins.insert(r.id);
  std::vector<Seed> chosen;
  for (const auto& s : seeds)
    if (origins.count(s.origin)) chosen.push_back(s);
  AugmentOptions opts;
  opts.per_pair = config.per_pair;
  opts.rng_seed = config.rng;
  opts.jobs = config.jobs;
  return generate(chosen, pick_hosts(hosts, config.hosts_per_label), opts);
}

// ---- full run ------------------------------------------------------------------

namespace {

template <typename T, typename F>
std::vector<nlohmann::json> rows_of(const std::vector<T>& items, F&& to) {
  std::vector<nlohmann::json> out;
  for (const auto& x : items) out.push_back(to(x));
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace

void run_pipeline(const PipelineConfig& config, const std::string& out_dir, bool resume) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  auto corpus = load_corpus(config.corpus, config.split);
  auto oracle = open_oracle(config.oracle);
  if (!config.cache_dir.empty()) oracle->attach_cache_dir(config.cache_dir);
  auto have = [&](const char* name) { return resume && fs::exists(dir / name); };

  std::vector<EvalRow> predictions;
  if (have("predictions.jsonl")) {
    for (const auto& j : read_jsonl((dir / "predictions.jsonl").string())) predictions.push_back(eval_row_from_json(j));
  } else {
    predictions = predict_stage(corpus, *oracle, config.jobs);
    write_jsonl((dir / "predictions.jsonl").string(), artifact_header(config, "predict"),
                rows_of(predictions, [](const EvalRow& r) { return to_json(r); }));
  }

  std::vector<std::vector<Seed>> seeds;
  if (have("seeds.jsonl")) {
    std::vector<Seed> flat;
    for (const auto& j : read_jsonl((dir / "seeds.jsonl").string())) flat.push_back(seed_from_json(j));
    seeds = group_seeds(corpus, flat);
  } else {
    seeds = seeds_stage(corpus, predictions, *oracle, config);
    std::vector<nlohmann::json> rows;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      for (const auto& s : seeds[i]) {
        auto j = to_json(s);
        j["method_tokens"] = body_token_count(corpus[i].method);
        j["seed_tokens"] = body_token_count(s.method_view);
        rows.push_back(std::move(j));
      }
    write_jsonl((dir / "seeds.jsonl").string(), artifact_header(config, "seeds"), rows);
  }

  std::vector<std::vector<Mutant>> mutants;
  if (have("mutants.jsonl")) {
    std::vector<Mutant> flat;
    for (const auto& j : read_jsonl((dir / "mutants.jsonl").string())) flat.push_back(mutant_from_json(j));
    mutants = group_mutants(corpus, flat);
  } else {
    mutants = mutants_stage(corpus, predictions, seeds, *oracle, config);
    std::vector<nlohmann::json> rows;
    for (const auto& per : mutants)
      for (const auto& m : per) rows.push_back(to_json(m));
    write_jsonl((dir / "mutants.jsonl").string(), artifact_header(config, "mutants"), rows);
  }

  std::vector<ConcretizedMethod> concretized;
  if (have("concretizations.jsonl")) {
    for (const auto& j : read_jsonl((dir / "concretizations.jsonl").string()))
      concretized.push_back(concretized_from_json(j));
  } else {
    concretized = concretize_stage(corpus, predictions, seeds, mutants, *oracle, config);
    write_jsonl((dir / "concretizations.jsonl").string(), artifact_header(config, "concretize"),
                rows_of(concretized, [](const ConcretizedMethod& c) { return to_json(c); }));
  }

  if (!have("grammars.jsonl")) {
    auto grammars = grammar_stage(concretized, oracle.get(), config);
    std::string header = "// " + artifact_header(config, "grammar").dump() + "\n";
    for (const auto& g : grammars) {
      std::string stem = grammar_file_stem(g.label);
      write_text(dir / "grammars" / (stem + ".bnf"), header + to_bnf(g.grammar));
      write_text(dir / "grammars" / (stem + ".json"), to_json(g.grammar).dump(2) + "\n");
    }
    write_jsonl((dir / "grammars.jsonl").string(), artifact_header(config, "grammar"),
                rows_of(grammars, [](const GrammarArtifact& g) {
                  auto j = to_json(g);
                  j.erase("grammar");
                  j["verified_depth"] = g.grammar.verified_depth ? nlohmann::json(*g.grammar.verified_depth)
                                                                 : nlohmann::json(nullptr);
                  j["rules"] = g.grammar.rules.size();
                  j["file"] = "grammars/" + grammar_file_stem(g.label) + ".bnf";
                  return j;
                }));
  }

  if (config.attack) {
    for (const auto& name : config.strategies) {
      std::string file = "attacks-" + name + ".jsonl";
      if (have(file.c_str())) continue;
      auto results = attack_stage(corpus, predictions, seeds, *oracle, strategy_from_name(name), config);
      write_jsonl((dir / file).string(), artifact_header(config, "attack-" + name),
                  rows_of(results, [](const AttackResult& r) { return to_json(r); }));
    }
  }

  if (config.augment && !have("augmented.jsonl")) {
    std::vector<Seed> flat;
    for (const auto& per : seeds) flat.insert(flat.end(), per.begin(), per.end());
    std::vector<Host> hosts;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      if (predictions[i].predicted == corpus[i].label) hosts.push_back({corpus[i].id, corpus[i].method, corpus[i].label});
    auto samples = augment_stage(predictions, flat, hosts, config);
    write_jsonl((dir / "augmented.jsonl").string(), artifact_header(config, "augment"),
                rows_of(samples, [](const AugmentedSample& s) { return to_json(s); }));
  }

  Report r = report(out_dir);
  write_text(dir / "report.txt", r.text);
  write_text(dir / "report.json", r.json.dump(2) + "\n");
}

}  // namespace patic
