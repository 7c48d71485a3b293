#include <algorithm>
#include <map>
#include <random>

#include "patic/augment.hpp"
#include "patic/errors.hpp"
#include "patic/parallel.hpp"

namespace patic {

std::vector<Label> select_targets(const std::vector<EvalRow>& eval, std::size_t min_count, double min_error_rate) {
  std::map<Label, std::pair<std::size_t, std::size_t>> tally;  // gold count, wrong count
  for (const auto& row : eval) {
    auto& t = tally[row.gold];
    ++t.first;
    t.second += row.predicted != row.gold;
  }
  std::vector<std::pair<double, Label>> picked;
  for (const auto& [label, t] : tally) {
    double rate = static_cast<double>(t.second) / static_cast<double>(t.first);
    if (t.first >= min_count && t.second > 0 && rate >= min_error_rate) picked.emplace_back(rate, label);
  }
  std::stable_sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Label> out;
  for (auto& p : picked) out.push_back(std::move(p.second));
  return out;
}

std::vector<Host> pick_hosts(const std::vector<Host>& candidates, std::size_t per_label, std::size_t max_hosts) {
  std::vector<Label> order;
  std::map<Label, std::vector<const Host*>> by_label;
  for (const auto& h : candidates) {
    auto& bucket = by_label[h.label];
    if (bucket.empty()) order.push_back(h.label);
    bucket.push_back(&h);
  }
  std::vector<Host> out;
  for (std::size_t round = 0; round < per_label; ++round) {
    for (const auto& label : order) {
      if (max_hosts && out.size() >= max_hosts) return out;
      const auto& bucket = by_label[label];
      if (round < bucket.size()) out.push_back(*bucket[round]);
    }
  }
  return out;
}

MethodUnit inject(const Seed& seed, const MethodUnit& host, std::size_t position) {
  if (position > host.body.size())
    throw PathError("injection position " + std::to_string(position) + " is past the end of " + host.header.name);
  MethodUnit out = host;
  const auto& stmts = seed.method_view.body;
  out.body.insert(out.body.begin() + static_cast<std::ptrdiff_t>(position), stmts.begin(), stmts.end());
  return out;
}

StatementSet injected_paths(const Seed& seed, const MethodUnit& host, std::size_t position) {
  MethodUnit out = inject(seed, host, position);
  StatementSet paths;
  std::size_t count = seed.method_view.body.size();
  for (const auto& p : statement_universe(out))
    if (p.front().index >= position && p.front().index < position + count) paths.insert(p);
  return paths;
}

std::string AugmentedSample::id() const {
  return origin + "+" + host + "@" + std::to_string(position) + "#" + seed;
}

nlohmann::json to_json(const AugmentedSample& s) {
  return {{"id", s.id()},
          {"source", pretty(s.method)},
          {"label", s.label},
          {"split", "augmented"},
          {"provenance", {{"origin", s.origin}, {"seed", s.seed}, {"host", s.host}, {"position", s.position}}}};
}

std::vector<AugmentedSample> generate(const std::vector<Seed>& mispredicted, const std::vector<Host>& hosts,
                                      const AugmentOptions& options) {
  const std::size_t pairs = mispredicted.size() * hosts.size();
  std::vector<std::vector<AugmentedSample>> slots(pairs);
  parallel_for(pairs, options.jobs, [&](std::size_t k) {
    const Seed& seed = mispredicted[k / hosts.size()];
    const Host& host = hosts[k % hosts.size()];
    if (seed.method_view.body.empty()) return;
    std::size_t slots_available = host.method.body.size() + 1;
    std::vector<std::size_t> all(slots_available), chosen;
    for (std::size_t i = 0; i < slots_available; ++i) all[i] = i;
    // Per-pair generator so the choice does not depend on scheduling.
    std::seed_seq sq{static_cast<std::uint32_t>(options.rng_seed), static_cast<std::uint32_t>(options.rng_seed >> 32),
                     static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    std::mt19937_64 rng(sq);
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), std::min(options.per_pair, slots_available), rng);
    std::string ref;
    for (const auto& p : seed.keep) ref += (ref.empty() ? "" : ",") + to_string(p);
    for (std::size_t pos : chosen) {
      AugmentedSample s;
      s.method = inject(seed, host.method, pos);
      s.label = host.label;
      s.origin = seed.origin;
      s.seed = ref;
      s.host = host.id;
      s.position = pos;
      slots[k].push_back(std::move(s));
    }
  });
  std::vector<AugmentedSample> out;
  for (auto& s : slots)
    for (auto& x : s) out.push_back(std::move(x));
  return out;
}

}  // namespace patic
