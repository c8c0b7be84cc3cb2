#include "oim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "oim/parallel.hpp"
#include "oim/rng.hpp"

namespace oim {

namespace {

void check_seeds(const Graph& g, const OpinionPartition& part, std::span<const NodeId> seeds) {
    if (part.size() != g.node_count())
        throw std::runtime_error("opinion partition size does not match graph");
    for (NodeId s : seeds)
        if (s >= g.node_count())
            throw std::runtime_error("seed node " + std::to_string(s) + " out of range");
}

} // namespace

CascadeOutcome simulate_once(const Graph& g, const OpinionPartition& part,
                             std::span<const NodeId> seeds, std::uint64_t rng_seed) {
    check_seeds(g, part, seeds);

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<std::uint8_t> active(g.node_count(), 0);
    std::vector<NodeId> frontier(seeds.begin(), seeds.end());
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());

    CascadeOutcome out;
    for (NodeId s : frontier) active[s] = 1;
    out.activated = frontier;

    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId u : frontier) {
            for (const Arc& a : g.out_arcs(u)) {
                if (active[a.to]) continue;
                if (coin(rng) < a.weight) {
                    active[a.to] = 1;
                    next.push_back(a.to);
                }
            }
        }
        std::sort(next.begin(), next.end());
        out.activated.insert(out.activated.end(), next.begin(), next.end());
        frontier = std::move(next);
    }

    std::sort(out.activated.begin(), out.activated.end());
    for (NodeId u : out.activated) {
        OpinionLabel l = part.label(u);
        if (l > 0) ++out.pos_count;
        else if (l < 0) ++out.neg_count;
    }
    return out;
}

SpreadEstimate evaluate_spread(const Graph& g, const OpinionPartition& part,
                               std::span<const NodeId> seeds, std::int64_t sims,
                               std::uint64_t master_seed, int threads) {
    check_seeds(g, part, seeds);
    if (sims <= 0) throw std::runtime_error("sims must be positive");

    struct Acc {
        std::int64_t pos{0}, neg{0}, net2{0};
    };
    std::vector<Acc> acc(kParallelChunks);
    std::vector<NodeId> seed_vec(seeds.begin(), seeds.end());

    parallel_chunks(sims, [&](int chunk, std::int64_t begin, std::int64_t end) {
        Acc a;
        for (std::int64_t i = begin; i < end; ++i) {
            CascadeOutcome o = simulate_once(g, part, seed_vec,
                                             mix_seed(master_seed, static_cast<std::uint64_t>(i)));
            a.pos += o.pos_count;
            a.neg += o.neg_count;
            a.net2 += o.net() * o.net();
        }
        acc[static_cast<std::size_t>(chunk)] = a;
    }, threads);

    Acc total;
    for (const Acc& a : acc) {
        total.pos += a.pos;
        total.neg += a.neg;
        total.net2 += a.net2;
    }

    SpreadEstimate est;
    est.sims = sims;
    est.mean_pos = static_cast<double>(total.pos) / static_cast<double>(sims);
    est.mean_neg = static_cast<double>(total.neg) / static_cast<double>(sims);
    est.mean_net = est.mean_pos - est.mean_neg;
    if (sims > 1) {
        double mean = est.mean_net;
        double ss = static_cast<double>(total.net2) - static_cast<double>(sims) * mean * mean;
        ss = std::max(0.0, ss);
        est.std_err_net = std::sqrt(ss / (static_cast<double>(sims - 1) * static_cast<double>(sims)));
    }
    return est;
}

} // namespace oim
