#pragma once

// Shared fixtures and small helpers for the unit suites and the acceptance
// runner. The brute-force helpers here are deliberately written as plain
// exhaustive loops so they stay independent of the library's selection code.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <unistd.h>
#include <vector>

#include "oim/graph.hpp"
#include "oim/opinion.hpp"
#include "oim/rng.hpp"
#include "oim/rr.hpp"

namespace testsupport {

struct TestInstance {
    oim::Graph g;
    oim::OpinionPartition part;
};

// Four live nodes on ids 1..4 plus the isolated node 0:
//   1:+  2:-  3:+  4:0,  edges 1->2 (w=1), 1->3 (w=0.5), 3->4 (w=1).
// Exact values: net({1}) = 0.5, net({3}) = 1.0, best single seed is 3.
inline TestInstance fixture_a() {
    std::vector<oim::Edge> edges{{1, 2, 1.0}, {1, 3, 0.5}, {3, 4, 1.0}};
    std::vector<oim::OpinionLabel> labels{0, 1, -1, 1, 0};
    return {oim::Graph(5, std::move(edges)), oim::OpinionPartition(std::move(labels))};
}

// Ten nodes, deterministic weights, built to make the objective demonstrably
// neither submodular nor supermodular:
//   labels: 0:+ 1:+ 2:0 3:+ 4:+ 5:- 6:- 7:- 8:- 9:0
//   edges:  0->1, 0->2, 3->5, 6->5, 7->8, 7->5, 8->9 (all weight 1)
// Checked facts: net({0,4}) = 3 is the exact optimum at k=2; the opinion-blind
// max-coverage pair {0,7} reaches 7 nodes but nets -1; adding 6 to {3} costs
// only 1 while adding it to the empty set costs 2 (breaks submodularity);
// adding 1 to {0} gains 0 while adding it to the empty set gains 1 (breaks
// supermodularity).
inline TestInstance fixture_b() {
    std::vector<oim::Edge> edges{{0, 1, 1.0}, {0, 2, 1.0}, {3, 5, 1.0}, {6, 5, 1.0},
                                 {7, 8, 1.0}, {7, 5, 1.0}, {8, 9, 1.0}};
    std::vector<oim::OpinionLabel> labels{1, 1, 0, 1, 1, -1, -1, -1, -1, 0};
    return {oim::Graph(10, std::move(edges)), oim::OpinionPartition(std::move(labels))};
}

// Random sparse instance: each ordered pair gets an edge with probability
// edge_prob, weight drawn from the given choices, labels iid by fraction.
inline TestInstance random_instance(oim::NodeId n, double edge_prob,
                                    std::span<const double> weight_choices, double pos_frac,
                                    double neg_frac, std::uint64_t seed) {
    std::mt19937_64 rng(oim::mix_seed(seed, 0xfeed));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pickw(0, weight_choices.size() - 1);
    std::vector<oim::Edge> edges;
    for (oim::NodeId u = 0; u < n; ++u)
        for (oim::NodeId v = 0; v < n; ++v) {
            if (u == v) continue;
            if (uni(rng) < edge_prob)
                edges.push_back(oim::Edge{u, v, weight_choices[pickw(rng)]});
        }
    std::vector<oim::OpinionLabel> labels(n);
    for (oim::NodeId v = 0; v < n; ++v) {
        double x = uni(rng);
        labels[v] = x < pos_frac ? oim::OpinionLabel{1}
                  : x < pos_frac + neg_frac ? oim::OpinionLabel{-1}
                                            : oim::OpinionLabel{0};
    }
    return {oim::Graph(n, std::move(edges)), oim::OpinionPartition(std::move(labels))};
}

inline std::size_t probabilistic_edge_count(const oim::Graph& g) {
    std::size_t c = 0;
    for (const oim::Edge& e : g.edges())
        if (e.weight > 0.0 && e.weight < 1.0) ++c;
    return c;
}

// Regenerates with derived seeds until the instance has at most max_prob
// probabilistic edges and at least one signed node. Deterministic.
inline TestInstance random_instance_capped(oim::NodeId n, double edge_prob,
                                           std::span<const double> weight_choices,
                                           double pos_frac, double neg_frac, std::uint64_t seed,
                                           std::size_t max_prob) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        TestInstance inst = random_instance(n, edge_prob, weight_choices, pos_frac, neg_frac,
                                            oim::mix_seed(seed, attempt));
        if (probabilistic_edge_count(inst.g) <= max_prob && !inst.part.signed_set().empty())
            return inst;
    }
}

// Exhaustive optimum of the pool objective over size-k sets, lexicographically
// smallest on ties.
inline std::pair<std::vector<oim::NodeId>, double> pool_exact_opt(
    const oim::SignedSamplePool& pool, int k) {
    oim::NodeId n = pool.node_count();
    std::vector<oim::NodeId> combo(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) combo[static_cast<std::size_t>(i)] = static_cast<oim::NodeId>(i);
    std::vector<oim::NodeId> best;
    double best_val = 0.0;
    bool first = true;
    for (;;) {
        double val = pool.estimate_sigma(combo).net;
        if (first || val > best_val) {
            best = combo;
            best_val = val;
            first = false;
        }
        int i = k - 1;
        while (i >= 0 && combo[static_cast<std::size_t>(i)] ==
                             n - static_cast<oim::NodeId>(k) + static_cast<oim::NodeId>(i))
            --i;
        if (i < 0) break;
        ++combo[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
    return {best, best_val};
}

// Scratch file that cleans up after itself.
class TempFile {
public:
    explicit TempFile(const std::string& stem) {
        static std::atomic<unsigned> counter{0};
        path_ = (std::filesystem::temp_directory_path() /
                 (stem + "." + std::to_string(::getpid()) + "." +
                  std::to_string(counter.fetch_add(1))))
                    .string();
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::string& path() const { return path_; }

    void write(const std::string& content) const {
        std::ofstream out(path_);
        out << content;
    }

private:
    std::string path_;
};

} // namespace testsupport
