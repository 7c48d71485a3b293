#pragma once

// Training-data augmentation: seeds of mis-predicted methods injected into
// correctly predicted hosts, labelled with the host's label.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "patic/ast.hpp"
#include "patic/oracle.hpp"
#include "patic/seeds.hpp"

namespace patic {

struct EvalRow {
  std::string id;
  Label gold;
  Label predicted;
};

// Labels with at least `min_count` gold occurrences and an error rate of at
// least `min_error_rate`, highest error rate first (ties by label).
std::vector<Label> select_targets(const std::vector<EvalRow>& eval, std::size_t min_count, double min_error_rate);

struct Host {
  std::string id;
  MethodUnit method;
  Label label;
};

// Round-robin over labels in first-appearance order, at most `per_label`
// hosts each; `max_hosts` 0 means no overall cap.
std::vector<Host> pick_hosts(const std::vector<Host>& candidates, std::size_t per_label = 1, std::size_t max_hosts = 0);

// The host with the seed's statements inserted at top-level `position`;
// throws PathError when the position is past the end of the body.
MethodUnit inject(const Seed& seed, const MethodUnit& host, std::size_t position);
// Every statement path the injection occupies in the result.
StatementSet injected_paths(const Seed& seed, const MethodUnit& host, std::size_t position);

struct AugmentedSample {
  MethodUnit method;
  Label label;
  std::string origin;  // mis-predicted method
  std::string seed;    // seed paths in the origin, comma separated
  std::string host;
  std::size_t position = 0;

  std::string id() const;
};

nlohmann::json to_json(const AugmentedSample& s);

struct AugmentOptions {
  std::size_t per_pair = 1;
  std::uint64_t rng_seed = 0;
  unsigned jobs = 1;
};

// Seeds in order, hosts in order, then ascending positions.
std::vector<AugmentedSample> generate(const std::vector<Seed>& mispredicted, const std::vector<Host>& hosts,
                                      const AugmentOptions& options = {});

}  // namespace patic
