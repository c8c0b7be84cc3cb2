#include "oim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "oim/rng.hpp"

namespace oim {

SynthInstance generate_synthetic(const SynthConfig& cfg) {
    if (cfg.n < 2) throw std::runtime_error("generator needs n >= 2");
    std::uint64_t max_edges = static_cast<std::uint64_t>(cfg.n) * (cfg.n - 1);
    if (cfg.m > max_edges) throw std::runtime_error("too many edges requested");
    if (!(cfg.w_min >= 0.0 && cfg.w_max <= 1.0 && cfg.w_min <= cfg.w_max))
        throw std::runtime_error("weight bounds must satisfy 0 <= w_min <= w_max <= 1");
    if (cfg.pos_frac < 0.0 || cfg.neg_frac < 0.0 || cfg.pos_frac + cfg.neg_frac > 1.0)
        throw std::runtime_error("opinion fractions must be non-negative and sum to at most 1");

    std::mt19937_64 rng(mix_seed(cfg.seed, 0));

    // Zipf weights over a shuffled order, so the hubs are not always the
    // lowest ids. Cumulative table + binary search per draw.
    std::vector<NodeId> order(cfg.n);
    for (NodeId v = 0; v < cfg.n; ++v) order[v] = v;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> cum(cfg.n);
    double total = 0.0;
    for (NodeId i = 0; i < cfg.n; ++i) {
        total += std::pow(static_cast<double>(i + 1), -cfg.zipf_exponent);
        cum[i] = total;
    }

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<NodeId> any(0, cfg.n - 1);
    std::uniform_real_distribution<double> wdist(cfg.w_min, cfg.w_max);

    auto pick_src = [&] {
        double x = uni(rng) * total;
        std::size_t i = static_cast<std::size_t>(
            std::lower_bound(cum.begin(), cum.end(), x) - cum.begin());
        if (i >= cfg.n) i = cfg.n - 1;
        return order[i];
    };

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(cfg.m) * 2);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(cfg.m));
    // Dense requests would stall rejection sampling; fall back to uniform
    // sources once duplicates dominate.
    std::uint64_t attempts = 0;
    std::uint64_t attempt_cap = cfg.m * 50 + 1000;
    while (edges.size() < cfg.m) {
        NodeId src = attempts < attempt_cap ? pick_src() : any(rng);
        NodeId dst = any(rng);
        ++attempts;
        if (src == dst) continue;
        std::uint64_t key = (static_cast<std::uint64_t>(src) << 32) | dst;
        if (!seen.insert(key).second) continue;
        edges.push_back(Edge{src, dst, wdist(rng)});
    }

    std::vector<OpinionLabel> labels(cfg.n);
    for (NodeId v = 0; v < cfg.n; ++v) {
        double x = uni(rng);
        labels[v] = x < cfg.pos_frac ? OpinionLabel{1}
                  : x < cfg.pos_frac + cfg.neg_frac ? OpinionLabel{-1}
                                                    : OpinionLabel{0};
    }

    SynthInstance inst;
    inst.graph = Graph(cfg.n, std::move(edges));
    inst.opinions = OpinionPartition(std::move(labels));
    return inst;
}

} // namespace oim
