#include "oim/oracle.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <vector>

#include "oim/parallel.hpp"

namespace oim {

namespace {

struct WorldModel {
    // Always-live adjacency (weight 1 edges) and the probabilistic edges that
    // get toggled per world. Weight 0 edges are dropped outright.
    std::vector<std::vector<NodeId>> sure_out;
    struct ProbEdge {
        NodeId src, dst;
        double w;
    };
    std::vector<ProbEdge> prob;
    std::vector<std::vector<std::uint32_t>> prob_out; // node -> indices into prob
};

WorldModel split_edges(const Graph& g) {
    WorldModel m;
    m.sure_out.resize(g.node_count());
    m.prob_out.resize(g.node_count());
    for (const Edge& e : g.edges()) {
        if (e.weight >= 1.0) {
            m.sure_out[e.src].push_back(e.dst);
        } else if (e.weight > 0.0) {
            m.prob_out[e.src].push_back(static_cast<std::uint32_t>(m.prob.size()));
            m.prob.push_back(WorldModel::ProbEdge{e.src, e.dst, e.weight});
        }
    }
    return m;
}

void check_budget(const WorldModel& m) {
    if (m.prob.size() > static_cast<std::size_t>(kMaxProbabilisticEdges))
        throw std::runtime_error(
            "graph has " + std::to_string(m.prob.size()) +
            " probabilistic edges, exceeding the world-enumeration budget of " +
            std::to_string(kMaxProbabilisticEdges) + "; use Monte Carlo evaluation instead");
}

double world_probability(const WorldModel& m, std::uint64_t mask) {
    double p = 1.0;
    for (std::size_t i = 0; i < m.prob.size(); ++i)
        p *= (mask >> i) & 1 ? m.prob[i].w : 1.0 - m.prob[i].w;
    return p;
}

// Nodes reachable from seeds in the world given by mask; visited is reused
// between calls via an epoch stamp.
void reach(const WorldModel& m, std::uint64_t mask, std::span<const NodeId> seeds,
           std::vector<std::uint32_t>& stamp, std::uint32_t epoch, std::vector<NodeId>& out) {
    out.clear();
    std::vector<NodeId> stack(seeds.begin(), seeds.end());
    for (NodeId s : stack) {
        if (stamp[s] != epoch) {
            stamp[s] = epoch;
            out.push_back(s);
        }
    }
    stack = out;
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId v : m.sure_out[u]) {
            if (stamp[v] != epoch) {
                stamp[v] = epoch;
                out.push_back(v);
                stack.push_back(v);
            }
        }
        for (std::uint32_t ei : m.prob_out[u]) {
            if (!((mask >> ei) & 1)) continue;
            NodeId v = m.prob[ei].dst;
            if (stamp[v] != epoch) {
                stamp[v] = epoch;
                out.push_back(v);
                stack.push_back(v);
            }
        }
    }
}

void check_inputs(const Graph& g, std::span<const NodeId> seeds) {
    for (NodeId s : seeds)
        if (s >= g.node_count())
            throw std::runtime_error("seed node " + std::to_string(s) + " out of range");
}

} // namespace

OracleResult exact_objective(const Graph& g, const OpinionPartition& part,
                             std::span<const NodeId> seeds) {
    if (part.size() != g.node_count())
        throw std::runtime_error("opinion partition size does not match graph");
    check_inputs(g, seeds);

    WorldModel m = split_edges(g);
    check_budget(m);
    std::uint64_t worlds = 1ULL << m.prob.size();

    struct Acc {
        double pos{0.0}, neg{0.0};
    };
    std::vector<Acc> acc(kParallelChunks);
    std::vector<NodeId> seed_vec(seeds.begin(), seeds.end());

    parallel_chunks(static_cast<std::int64_t>(worlds),
                    [&](int chunk, std::int64_t begin, std::int64_t end) {
        std::vector<std::uint32_t> stamp(g.node_count(), 0);
        std::vector<NodeId> reached;
        Acc a;
        for (std::int64_t w = begin; w < end; ++w) {
            std::uint64_t mask = static_cast<std::uint64_t>(w);
            double p = world_probability(m, mask);
            reach(m, mask, seed_vec, stamp, static_cast<std::uint32_t>(w - begin) + 1, reached);
            std::int64_t pos = 0, neg = 0;
            for (NodeId u : reached) {
                OpinionLabel l = part.label(u);
                if (l > 0) ++pos;
                else if (l < 0) ++neg;
            }
            a.pos += p * static_cast<double>(pos);
            a.neg += p * static_cast<double>(neg);
        }
        acc[static_cast<std::size_t>(chunk)] = a;
    });

    OracleResult res;
    res.worlds_enumerated = worlds;
    for (const Acc& a : acc) {
        res.exact_pos += a.pos;
        res.exact_neg += a.neg;
    }
    res.exact_net = res.exact_pos - res.exact_neg;
    return res;
}

double exact_activation_prob(const Graph& g, std::span<const NodeId> seeds, NodeId u) {
    check_inputs(g, seeds);
    if (u >= g.node_count())
        throw std::runtime_error("node " + std::to_string(u) + " out of range");

    WorldModel m = split_edges(g);
    check_budget(m);
    std::uint64_t worlds = 1ULL << m.prob.size();

    std::vector<double> acc(kParallelChunks, 0.0);
    std::vector<NodeId> seed_vec(seeds.begin(), seeds.end());

    parallel_chunks(static_cast<std::int64_t>(worlds),
                    [&](int chunk, std::int64_t begin, std::int64_t end) {
        std::vector<std::uint32_t> stamp(g.node_count(), 0);
        std::vector<NodeId> reached;
        double a = 0.0;
        for (std::int64_t w = begin; w < end; ++w) {
            std::uint64_t mask = static_cast<std::uint64_t>(w);
            reach(m, mask, seed_vec, stamp, static_cast<std::uint32_t>(w - begin) + 1, reached);
            if (std::find(reached.begin(), reached.end(), u) != reached.end())
                a += world_probability(m, mask);
        }
        acc[static_cast<std::size_t>(chunk)] = a;
    });

    double p = 0.0;
    for (double a : acc) p += a;
    return p;
}

std::pair<std::vector<NodeId>, double> brute_force_opt(const Graph& g,
                                                       const OpinionPartition& part, int k) {
    NodeId n = g.node_count();
    if (part.size() != n)
        throw std::runtime_error("opinion partition size does not match graph");
    if (k < 1 || static_cast<NodeId>(k) > n)
        throw std::runtime_error("k must lie in [1, n]");

    // C(n,k) with early-out against the subset budget.
    std::uint64_t subsets = 1;
    for (int i = 0; i < k; ++i) {
        subsets = subsets * (n - static_cast<NodeId>(i)) / static_cast<std::uint64_t>(i + 1);
        if (subsets > kMaxBruteForceSubsets)
            throw std::runtime_error("C(n,k) exceeds the brute-force budget of " +
                                     std::to_string(kMaxBruteForceSubsets) + " subsets");
    }

    WorldModel m = split_edges(g);
    check_budget(m);
    std::uint64_t worlds = 1ULL << m.prob.size();

    // For small n, per-world per-node reach masks turn each subset evaluation
    // into a few OR/popcount operations.
    bool mask_path = n <= 30 && m.prob.size() <= 16;

    std::vector<std::vector<std::uint32_t>> reach_mask; // world -> node -> mask
    std::vector<double> world_p(worlds);
    std::uint32_t pos_mask = 0, neg_mask = 0;
    if (mask_path) {
        for (NodeId u : part.positive_set()) pos_mask |= 1u << u;
        for (NodeId u : part.negative_set()) neg_mask |= 1u << u;
        reach_mask.assign(worlds, std::vector<std::uint32_t>(n, 0));
        std::vector<std::uint32_t> stamp(n, 0);
        std::vector<NodeId> reached;
        std::uint32_t epoch = 0;
        for (std::uint64_t w = 0; w < worlds; ++w) {
            world_p[w] = world_probability(m, w);
            for (NodeId u = 0; u < n; ++u) {
                NodeId root[1] = {u};
                reach(m, w, root, stamp, ++epoch, reached);
                std::uint32_t bits = 0;
                for (NodeId v : reached) bits |= 1u << v;
                reach_mask[w][u] = bits;
            }
        }
    }

    std::vector<NodeId> combo(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) combo[static_cast<std::size_t>(i)] = static_cast<NodeId>(i);

    std::vector<NodeId> best;
    double best_val = 0.0;
    bool first = true;

    auto evaluate = [&](const std::vector<NodeId>& S) {
        if (!mask_path) return exact_objective(g, part, S).exact_net;
        double pos = 0.0, neg = 0.0;
        for (std::uint64_t w = 0; w < worlds; ++w) {
            std::uint32_t bits = 0;
            for (NodeId s : S) bits |= reach_mask[w][s];
            pos += world_p[w] * static_cast<double>(std::popcount(bits & pos_mask));
            neg += world_p[w] * static_cast<double>(std::popcount(bits & neg_mask));
        }
        return pos - neg;
    };

    // Lexicographic enumeration plus strict improvement keeps the first (and
    // hence lexicographically smallest) maximizer.
    for (;;) {
        double val = evaluate(combo);
        if (first || val > best_val) {
            best = combo;
            best_val = val;
            first = false;
        }
        int i = k - 1;
        while (i >= 0 && combo[static_cast<std::size_t>(i)] ==
                             n - static_cast<NodeId>(k) + static_cast<NodeId>(i))
            --i;
        if (i < 0) break;
        ++combo[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
    return {best, best_val};
}

} // namespace oim
