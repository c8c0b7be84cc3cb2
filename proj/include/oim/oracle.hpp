#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "oim/graph.hpp"
#include "oim/opinion.hpp"

namespace oim {

// Exact values come from enumerating live-edge worlds: every edge with weight
// strictly between 0 and 1 is independently live or dead, edges of weight 1
// are always live and weight 0 edges never exist. Enumeration is refused
// beyond kMaxProbabilisticEdges probabilistic edges; use Monte Carlo there.
inline constexpr int kMaxProbabilisticEdges = 24;
inline constexpr std::uint64_t kMaxBruteForceSubsets = 1'000'000;

struct OracleResult {
    double exact_pos{0.0};
    double exact_neg{0.0};
    double exact_net{0.0}; // always exact_pos - exact_neg
    std::uint64_t worlds_enumerated{0};
};

OracleResult exact_objective(const Graph& g, const OpinionPartition& part,
                             std::span<const NodeId> seeds);

// Probability that the seed set reaches u through live edges.
double exact_activation_prob(const Graph& g, std::span<const NodeId> seeds, NodeId u);

// Exhaustive optimum over all size-k seed sets, by exact objective value.
// Ties go to the lexicographically smallest set. Refused when C(n,k) exceeds
// kMaxBruteForceSubsets or the world budget is blown.
std::pair<std::vector<NodeId>, double> brute_force_opt(const Graph& g,
                                                       const OpinionPartition& part, int k);

} // namespace oim
