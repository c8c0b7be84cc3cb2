#include "oim/baselines.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "oim/sandwich.hpp"

namespace oim {

namespace {

void check_k(NodeId n, int k) {
    if (k < 0) throw std::runtime_error("k must be non-negative");
    if (static_cast<NodeId>(k) > n) throw std::runtime_error("k exceeds node count");
}

} // namespace

std::vector<NodeId> rand_seeds(NodeId n, int k, std::uint64_t rng_seed) {
    check_k(n, k);
    std::vector<NodeId> ids(n);
    for (NodeId v = 0; v < n; ++v) ids[v] = v;
    std::mt19937_64 rng(rng_seed);
    // Partial Fisher-Yates: the first k slots end up a uniform sample.
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<NodeId> pick(static_cast<NodeId>(i), n - 1);
        std::swap(ids[static_cast<NodeId>(i)], ids[pick(rng)]);
    }
    ids.resize(static_cast<std::size_t>(k));
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<NodeId> degdis_opinion(const Graph& g, const OpinionPartition& part, int k) {
    NodeId n = g.node_count();
    check_k(n, k);
    if (part.size() != n) throw std::runtime_error("opinion partition size does not match graph");

    double p = g.mean_edge_weight();

    std::vector<std::int64_t> d_pos(n, 0), d_neg(n, 0);
    std::vector<std::int64_t> t_pos(n, 0), t_neg(n, 0);
    for (NodeId v = 0; v < n; ++v) {
        for (const Arc& a : g.out_arcs(v)) {
            OpinionLabel l = part.label(a.to);
            if (l > 0) ++d_pos[v];
            else if (l < 0) ++d_neg[v];
        }
    }

    auto discounted = [&](std::int64_t d, std::int64_t t) {
        double dd = static_cast<double>(d), tt = static_cast<double>(t);
        return dd - 2.0 * tt - (dd - tt) * tt * p;
    };

    std::vector<double> score(n);
    for (NodeId v = 0; v < n; ++v)
        score[v] = discounted(d_pos[v], t_pos[v]) - discounted(d_neg[v], t_neg[v]);

    std::vector<std::uint8_t> chosen(n, 0);
    std::vector<NodeId> seeds;
    seeds.reserve(static_cast<std::size_t>(k));
    for (int round = 0; round < k; ++round) {
        NodeId best = n;
        for (NodeId v = 0; v < n; ++v) {
            if (chosen[v]) continue;
            if (best == n || score[v] > score[best]) best = v;
        }
        chosen[best] = 1;
        seeds.push_back(best);
        OpinionLabel l = part.label(best);
        if (l == 0) continue; // neutral picks discount nothing
        for (const Arc& a : g.out_arcs(best)) {
            NodeId u = a.to;
            if (chosen[u]) continue;
            if (l > 0) ++t_pos[u];
            else ++t_neg[u];
            score[u] = discounted(d_pos[u], t_pos[u]) - discounted(d_neg[u], t_neg[u]);
        }
    }
    return seeds;
}

std::vector<NodeId> run_baseline(const std::string& name, const Graph& g,
                                 const OpinionPartition& part, int k, std::uint64_t rng_seed,
                                 const SignedSamplePool* im_pool) {
    if (name == "rand") return rand_seeds(g.node_count(), k, rng_seed);
    if (name == "degdis") return degdis_opinion(g, part, k);
    if (name == "im") {
        if (!im_pool) throw std::runtime_error("im baseline needs an all-roots sample pool");
        return greedy_im(*im_pool, k);
    }
    throw std::runtime_error("unknown baseline '" + name + "'");
}

} // namespace oim
