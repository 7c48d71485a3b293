#pragma once

// Independent reference implementations used to check the library.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "patic/edit.hpp"

namespace oracle {

// Brute-force distance: meets in the middle over all forests reachable within
// max_depth edits, relabeling only with labels present in either input.
// Returns nullopt when the distance exceeds max_depth.
std::optional<std::size_t> bfs_distance(const patic::Forest& a, const patic::Forest& b, std::size_t max_depth);

// Every single edit applicable to a forest with the given label alphabet.
std::vector<patic::EditOp> all_edits(const patic::Forest& f, const std::vector<std::string>& labels);

patic::AstNode random_tree(std::mt19937_64& rng, std::size_t nodes, const std::vector<std::string>& labels);

// A tree reached from `from` by at most `edits` random edits over labels
// {a, b, c}, or nullopt when the result is a forest or exceeds max_nodes.
std::optional<patic::AstNode> perturb(std::mt19937_64& rng, const patic::AstNode& from, std::size_t max_nodes,
                                      std::size_t edits);

// A random tree over {a, b, c} and a perturbation of it.
std::pair<patic::AstNode, patic::AstNode> random_pair(std::mt19937_64& rng, std::size_t max_nodes, std::size_t edits);

// Bracket notation: a(b c(d)).
std::string show(const patic::Forest& f);
patic::AstNode tree(const std::string& bracket);

}  // namespace oracle
