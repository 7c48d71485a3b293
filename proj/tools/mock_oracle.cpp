// Serves a mock model spec over the oracle wire protocol on stdin/stdout.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "patic/errors.hpp"
#include "patic/oracle.hpp"

int main(int argc, char** argv) {
  CLI::App app{"patic-mock-oracle"};
  std::string spec_path;
  int crash_after = -1;
  bool garble = false;
  app.add_option("spec", spec_path, "mock spec JSON")->required();
  app.add_option("--crash-after", crash_after, "exit after answering this many requests");
  app.add_flag("--garble", garble, "answer with malformed JSON");
  CLI11_PARSE(app, argc, argv);

  patic::MockModelSpec spec;
  try {
    std::ifstream in(spec_path);
    if (!in) throw patic::DataError("cannot read " + spec_path);
    spec = patic::MockModelSpec::from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    std::cerr << "patic-mock-oracle: " << e.what() << "\n";
    return 3;
  }
  std::cout << nlohmann::json{{"protocol", "patic-oracle/1"}, {"top_k", 2}, {"concurrent", true}}.dump() << std::endl;
  std::string line;
  int answered = 0;
  while (std::getline(std::cin, line)) {
    if (crash_after >= 0 && answered >= crash_after) return 1;
    if (garble) {
      std::cout << "{not json" << std::endl;
      continue;
    }
    auto req = nlohmann::json::parse(line, nullptr, false);
    if (req.is_discarded() || !req.contains("id") || !req.contains("source")) {
      std::cerr << "patic-mock-oracle: bad request\n";
      return 2;
    }
    nlohmann::json resp{{"id", req["id"]}};
    try {
      resp["predictions"] = patic::to_json(patic::mock_predict(spec, patic::parse_method(req["source"].get<std::string>())));
    } catch (const patic::Error& e) {
      resp["predictions"] = patic::to_json(patic::Prediction{{{spec.default_label, 1.0}}});
    }
    std::cout << resp.dump() << std::endl;
    ++answered;
  }
  return 0;
}
