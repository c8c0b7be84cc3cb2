#pragma once

#include <cstdint>

#include "oim/graph.hpp"
#include "oim/opinion.hpp"

namespace oim {

// Synthetic instance: sources drawn from a Zipf distribution over a shuffled
// node order (heavy-tailed out-degrees), targets uniform, no duplicate edges
// or self loops; weights uniform in [w_min, w_max]; labels iid with the given
// positive/negative fractions.
struct SynthConfig {
    NodeId n{1000};
    std::uint64_t m{5000};
    double zipf_exponent{1.0};
    double w_min{0.01};
    double w_max{0.2};
    double pos_frac{0.35};
    double neg_frac{0.35};
    std::uint64_t seed{1};
};

struct SynthInstance {
    Graph graph;
    OpinionPartition opinions;
};

SynthInstance generate_synthetic(const SynthConfig& cfg);

} // namespace oim
