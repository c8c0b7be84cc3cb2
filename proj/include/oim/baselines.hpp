#pragma once

#include <cstdint>
#include <string>

#include "oim/graph.hpp"
#include "oim/opinion.hpp"
#include "oim/rr.hpp"

namespace oim {

// Uniform sample of k distinct nodes, ascending. Deterministic per rng_seed.
std::vector<NodeId> rand_seeds(NodeId n, int k, std::uint64_t rng_seed);

// Opinion-aware degree discount. Initial score of v is the label sum of its
// out-neighbours; after a pick, every unchosen out-neighbour of the pick
// rediscounts itself with the classic dd = d - 2t - (d - t) * t * p
// recurrence run separately over its positive and negative out-neighbour
// counts, where t counts already-chosen in-neighbours of matching label and
// p is the mean edge weight. Neutral nodes contribute nothing anywhere.
// With every label positive this is exactly classic degree discount.
std::vector<NodeId> degdis_opinion(const Graph& g, const OpinionPartition& part, int k);

// Dispatch by name: "rand", "degdis" or "im". The IM baseline needs a pool
// built over all roots (SignedSamplePool::build_unsigned).
std::vector<NodeId> run_baseline(const std::string& name, const Graph& g,
                                 const OpinionPartition& part, int k, std::uint64_t rng_seed,
                                 const SignedSamplePool* im_pool = nullptr);

} // namespace oim
