#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "patic/errors.hpp"
#include "patic/pipeline.hpp"

namespace patic {

namespace {

namespace fs = std::filesystem;

std::optional<double> mean(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::optional<double> median(std::vector<double> xs) {
  if (xs.empty()) return std::nullopt;
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string fmt(const std::optional<double>& v, const char* suffix = "") {
  if (!v) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%s", *v, suffix);
  return buf;
}

}  // namespace

Report report(const std::string& dir) {
  fs::path d(dir);
  for (const char* required : {"predictions.jsonl", "seeds.jsonl"})
    if (!fs::exists(d / required)) throw MissingStage(std::string("missing stage artifact ") + (d / required).string());

  Report r;
  std::ostringstream text;
  nlohmann::json& j = r.json;
  j["token_counting"] = "lexer tokens of the pretty-printed method body";

  auto predictions = read_jsonl((d / "predictions.jsonl").string());
  std::size_t correct = 0;
  for (const auto& p : predictions) correct += eval_row_from_json(p).gold == eval_row_from_json(p).predicted;
  j["methods"] = predictions.size();
  j["correct"] = correct;
  text << "Methods: " << predictions.size() << " (" << correct << " correctly predicted)\n";
  text << "Tokens are lexer tokens of the pretty-printed method body.\n\n";

  std::vector<double> tokens, percentages;
  for (const auto& s : read_jsonl((d / "seeds.jsonl").string())) {
    Seed seed = seed_from_json(s);
    double seed_tokens = static_cast<double>(s.value("seed_tokens", body_token_count(seed.method_view)));
    tokens.push_back(seed_tokens);
    if (s.contains("method_tokens") && s["method_tokens"].get<double>() > 0)
      percentages.push_back(100.0 * seed_tokens / s["method_tokens"].get<double>());
  }
  j["seed_size"] = {{"seeds", tokens.size()},
                    {"mean_tokens", opt(mean(tokens))},
                    {"median_tokens", opt(median(tokens))},
                    {"mean_percentage", opt(mean(percentages))},
                    {"median_percentage", opt(median(percentages))}};
  text << "Seed size\n";
  text << "  seeds  mean  median  mean%  median%\n";
  text << "  " << tokens.size() << "  " << fmt(mean(tokens)) << "  " << fmt(median(tokens)) << "  "
       << fmt(mean(percentages), "%") << "  " << fmt(median(percentages), "%") << "\n\n";

  j["grammars"] = nlohmann::json::array();
  if (fs::exists(d / "grammars.jsonl")) {
    text << "Grammars\n";
    text << "  label  control-flow structures  syntactic variations  rules  verified depth\n";
    for (const auto& g : read_jsonl((d / "grammars.jsonl").string())) {
      nlohmann::json row = {{"label", g.at("label")},
                            {"shapes", g.at("shapes")},
                            {"variations", g.at("variations")},
                            {"rules", g.value("rules", 0)},
                            {"verified_depth", g.value("verified_depth", nlohmann::json(nullptr))}};
      text << "  " << to_string(g.at("label").get<Label>()) << "  " << g.at("shapes").dump() << "  "
           << g.at("variations").dump() << "  " << row["rules"].dump() << "  "
           << (row["verified_depth"].is_null() ? "unverified" : row["verified_depth"].dump()) << "\n";
      j["grammars"].push_back(std::move(row));
    }
    text << "\n";
  }

  j["robustness"] = nlohmann::json::object();
  std::vector<fs::path> attack_files;
  for (const auto& e : fs::directory_iterator(d)) {
    std::string name = e.path().filename().string();
    if (name.rfind("attacks-", 0) == 0 && e.path().extension() == ".jsonl") attack_files.push_back(e.path());
  }
  std::sort(attack_files.begin(), attack_files.end());
  if (!attack_files.empty()) {
    text << "Robustness\n";
    text << "  strategy  methods  mean distance  mean attempts  failures\n";
  }
  for (const auto& f : attack_files) {
    std::string strategy = f.stem().string().substr(8);
    std::vector<AttackResult> results;
    for (const auto& a : read_jsonl(f.string())) results.push_back(attack_result_from_json(a));
    if (results.empty()) {
      j["robustness"][strategy] = {{"methods", 0}};
      text << "  " << strategy << "  0  n/a  n/a  n/a\n";
      continue;
    }
    RobustnessReport rep = score(results);
    j["robustness"][strategy] = to_json(rep);
    text << "  " << strategy << "  " << rep.methods << "  " << fmt(rep.mean_distance) << "  "
         << fmt(rep.mean_attempts) << "  " << fmt(rep.failure_percentage, "%") << "\n";
  }
  if (!attack_files.empty()) text << "\n";

  if (fs::exists(d / "augmented.jsonl")) {
    std::map<std::string, std::size_t> per_label;
    std::size_t total = 0;
    for (const auto& a : read_jsonl((d / "augmented.jsonl").string())) {
      ++total;
      ++per_label[to_string(a.at("label").get<Label>())];
    }
    j["augmentation"] = {{"samples", total}, {"per_label", per_label}};
    text << "Augmentation\n  generated programs: " << total << "\n";
    for (const auto& [label, n] : per_label) text << "  " << label << ": " << n << "\n";
  }
  r.text = text.str();
  return r;
}

}  // namespace patic
