#pragma once

#include <cstdint>
#include <span>

#include "oim/graph.hpp"
#include "oim/opinion.hpp"

namespace oim {

struct CascadeOutcome {
    std::vector<NodeId> activated; // ascending
    std::int64_t pos_count{0};
    std::int64_t neg_count{0};
    std::int64_t net() const { return pos_count - neg_count; }
};

// One independent-cascade run. Every active node gets a single chance to
// activate each currently inactive out-neighbour, succeeding with the edge
// weight. Activated nodes keep their fixed opinion label; seeds adopt their
// own labels like everyone else. Deterministic given rng_seed: the frontier
// is processed in ascending node id order and neighbours in adjacency order,
// with one RNG draw per attempted edge.
CascadeOutcome simulate_once(const Graph& g, const OpinionPartition& part,
                             std::span<const NodeId> seeds, std::uint64_t rng_seed);

struct SpreadEstimate {
    double mean_pos{0.0};
    double mean_neg{0.0};
    double mean_net{0.0}; // always mean_pos - mean_neg
    double std_err_net{0.0};
    std::int64_t sims{0};
};

// Monte Carlo estimate over `sims` runs; run i uses the engine seeded by
// mix_seed(master_seed, i), so the result is independent of thread count.
SpreadEstimate evaluate_spread(const Graph& g, const OpinionPartition& part,
                               std::span<const NodeId> seeds, std::int64_t sims,
                               std::uint64_t master_seed, int threads = 0);

} // namespace oim
