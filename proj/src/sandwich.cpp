#include "oim/sandwich.hpp"

#include <algorithm>
#include <stdexcept>

namespace oim {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error(msg);
}

void check_k(const SignedSamplePool& pool, int k) {
    if (k < 0) fail("k must be non-negative");
    if (static_cast<NodeId>(k) > pool.node_count()) fail("k exceeds node count");
}

// Descending by value, ties ascending id.
std::vector<NodeId> order_by_value(const std::vector<std::int64_t>& value) {
    std::vector<NodeId> perm(value.size());
    for (NodeId v = 0; v < perm.size(); ++v) perm[v] = v;
    std::stable_sort(perm.begin(), perm.end(),
                     [&](NodeId a, NodeId b) { return value[a] > value[b]; });
    return perm;
}

// Coverage sweep along perm restricted to samples of one sign; chain[v] gets
// the count of newly covered such samples when v joins the prefix.
std::vector<std::int64_t> chain_gains(const SignedSamplePool& pool,
                                      const std::vector<NodeId>& perm, int sign) {
    std::vector<std::int64_t> chain(pool.node_count(), 0);
    std::vector<std::uint8_t> covered(pool.size(), 0);
    for (NodeId v : perm) {
        std::int64_t c = 0;
        for (std::uint32_t i : pool.samples_containing(v)) {
            if (covered[i]) continue;
            if ((sign > 0) == (pool.sample(i).sign > 0)) {
                covered[i] = 1;
                ++c;
            }
        }
        chain[v] = c;
    }
    return chain;
}

NodeId argmax_count(const std::vector<std::int64_t>& value,
                    const std::vector<std::uint8_t>& taken, NodeId n) {
    std::int64_t best = 0;
    NodeId who = n;
    for (NodeId v = 0; v < n; ++v) {
        if (taken[v]) continue;
        if (who == n || value[v] > best) {
            best = value[v];
            who = v;
        }
    }
    return who;
}

// Top-k of a static per-node count, ties ascending id (selection order is
// descending value).
std::vector<NodeId> top_k(const std::vector<std::int64_t>& value, int k) {
    std::vector<NodeId> perm = order_by_value(value);
    perm.resize(static_cast<std::size_t>(k));
    return perm;
}

struct GreedyState {
    // gain[v] = signed count of uncovered samples containing v.
    std::vector<std::int64_t> gain;
    std::vector<std::uint8_t> covered;
    std::vector<std::uint8_t> taken;

    GreedyState(const SignedSamplePool& pool, bool positive_only, bool negative_only)
        : gain(pool.node_count(), 0), covered(pool.size(), 0), taken(pool.node_count(), 0) {
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const RrSample& s = pool.sample(i);
            bool pos = s.sign > 0;
            if (positive_only && !pos) continue;
            if (negative_only && pos) continue;
            std::int64_t d = pos ? 1 : -1;
            for (NodeId v : s.members) gain[v] += d;
        }
    }

    // Marks v's uncovered tracked samples covered and updates neighbours.
    void take(const SignedSamplePool& pool, NodeId v, bool positive_only, bool negative_only) {
        taken[v] = 1;
        for (std::uint32_t i : pool.samples_containing(v)) {
            if (covered[i]) continue;
            const RrSample& s = pool.sample(i);
            bool pos = s.sign > 0;
            if (positive_only && !pos) continue;
            if (negative_only && pos) continue;
            covered[i] = 1;
            std::int64_t d = pos ? 1 : -1;
            for (NodeId w : s.members) gain[w] -= d;
        }
    }
};

// k rounds of argmax over value(v) = static_part[v] + dynamic gain from
// state; covers the middle chain (no static part) and both adaptive chains.
std::vector<NodeId> greedy_rounds(const SignedSamplePool& pool, int k, GreedyState& state,
                                  const std::vector<std::int64_t>* static_part,
                                  std::int64_t static_sign,
                                  bool positive_only, bool negative_only,
                                  std::vector<std::int64_t>* step_gains) {
    NodeId n = pool.node_count();
    std::vector<NodeId> chain;
    chain.reserve(static_cast<std::size_t>(k));
    std::vector<std::int64_t> value(n);
    for (int round = 0; round < k; ++round) {
        for (NodeId v = 0; v < n; ++v)
            value[v] = state.gain[v] + (static_part ? static_sign * (*static_part)[v] : 0);
        NodeId v = argmax_count(value, state.taken, n);
        if (step_gains) step_gains->push_back(value[v]);
        chain.push_back(v);
        state.take(pool, v, positive_only, negative_only);
    }
    return chain;
}

} // namespace

std::int64_t BoundTables::upper_count(std::span<const NodeId> S) const {
    std::int64_t c = 0;
    for (NodeId v : S) c += singleton_pos[v] - chain_neg[v];
    return c;
}

std::int64_t BoundTables::lower_count(std::span<const NodeId> S) const {
    std::int64_t c = 0;
    for (NodeId v : S) c += chain_pos[v] - singleton_neg[v];
    return c;
}

double BoundTables::upper_value(std::span<const NodeId> S) const {
    return scale * static_cast<double>(upper_count(S));
}

double BoundTables::lower_value(std::span<const NodeId> S) const {
    return scale * static_cast<double>(lower_count(S));
}

BoundTables build_bound_tables(const SignedSamplePool& pool) {
    BoundTables t;
    t.scale = pool.scale();
    NodeId n = pool.node_count();
    t.singleton_pos.assign(n, 0);
    t.singleton_neg.assign(n, 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const RrSample& s = pool.sample(i);
        auto& tab = s.sign > 0 ? t.singleton_pos : t.singleton_neg;
        for (NodeId v : s.members) ++tab[v];
    }
    t.perm_pos = order_by_value(t.singleton_pos);
    t.perm_neg = order_by_value(t.singleton_neg);
    t.chain_pos = chain_gains(pool, t.perm_pos, +1);
    t.chain_neg = chain_gains(pool, t.perm_neg, -1);
    return t;
}

SandwichResult sandwich_greedy(const SignedSamplePool& pool, int k, const BoundTables& tables,
                               const SandwichOptions& options) {
    check_k(pool, k);
    NodeId n = pool.node_count();
    if (tables.singleton_pos.size() != n) fail("bound tables do not match pool");

    SandwichResult res;

    // Middle: adaptive greedy on the true pool marginal gain.
    {
        GreedyState state(pool, false, false);
        std::vector<std::int64_t> steps;
        res.chain_mid = greedy_rounds(pool, k, state, nullptr, 0, false, false, &steps);
        res.mid_step_gains.reserve(steps.size());
        for (std::int64_t s : steps)
            res.mid_step_gains.push_back(pool.scale() * static_cast<double>(s));
    }

    // Upper and lower chains: exact top-k of the modular bounds, or their
    // adaptive re-anchored variants.
    if (!options.adaptive_bounds) {
        std::vector<std::int64_t> upper_val(n), lower_val(n);
        for (NodeId v = 0; v < n; ++v) {
            upper_val[v] = tables.singleton_pos[v] - tables.chain_neg[v];
            lower_val[v] = tables.chain_pos[v] - tables.singleton_neg[v];
        }
        res.chain_upper = top_k(upper_val, k);
        res.chain_lower = top_k(lower_val, k);
    } else {
        // Upper: static singleton positives, live negative marginals.
        GreedyState up(pool, false, true);
        res.chain_upper =
            greedy_rounds(pool, k, up, &tables.singleton_pos, +1, false, true, nullptr);
        // Lower: live positive marginals, static singleton negatives.
        GreedyState lo(pool, true, false);
        res.chain_lower =
            greedy_rounds(pool, k, lo, &tables.singleton_neg, -1, true, false, nullptr);
    }

    res.sigma_mid = pool.estimate_sigma(res.chain_mid);
    res.sigma_upper = pool.estimate_sigma(res.chain_upper);
    res.sigma_lower = pool.estimate_sigma(res.chain_lower);

    struct Candidate {
        const std::vector<NodeId>* chain;
        const char* name;
        double net;
    };
    Candidate cands[3] = {
        {&res.chain_mid, "middle", res.sigma_mid.net},
        {&res.chain_upper, "upper", res.sigma_upper.net},
        {&res.chain_lower, "lower", res.sigma_lower.net},
    };

    if (!options.best_prefix) {
        const Candidate* best = &cands[0];
        for (const Candidate& c : cands)
            if (c.net > best->net) best = &c;
        res.returned = *best->chain;
        res.sigma_returned = best->net;
        res.winner = best->name;
        return res;
    }

    // Best prefix across the three chains, full chains considered first so
    // the flag never changes the answer unless a strict improvement exists.
    const Candidate* best = &cands[0];
    for (const Candidate& c : cands)
        if (c.net > best->net) best = &c;
    std::vector<NodeId> best_set = *best->chain;
    double best_net = best->net;
    std::string best_name = best->name;
    // The length-0 prefix is the empty set with sigma 0.
    if (0.0 > best_net) {
        best_set.clear();
        best_net = 0.0;
        best_name = "empty";
    }
    for (const Candidate& c : cands) {
        std::vector<NodeId> prefix;
        std::vector<std::uint8_t> covered(pool.size(), 0);
        std::int64_t cum = 0;
        for (NodeId v : *c.chain) {
            for (std::uint32_t i : pool.samples_containing(v)) {
                if (covered[i]) continue;
                covered[i] = 1;
                cum += pool.sample(i).sign > 0 ? 1 : -1;
            }
            prefix.push_back(v);
            double net = pool.scale() * static_cast<double>(cum);
            if (net > best_net) {
                best_set = prefix;
                best_net = net;
                best_name = c.name;
            }
        }
    }
    res.returned = std::move(best_set);
    res.sigma_returned = best_net;
    res.winner = best_name;
    return res;
}

RatioReport ratio_report(const SignedSamplePool& pool, const SandwichResult& result,
                         const BoundTables& tables,
                         std::optional<std::span<const NodeId>> oracle_opt) {
    RatioReport rep;
    double upper_bound = tables.upper_value(result.chain_upper);
    if (upper_bound > 0.0) rep.upper = result.sigma_upper.net / upper_bound;
    if (oracle_opt) {
        double opt_sigma = pool.estimate_sigma(*oracle_opt).net;
        if (opt_sigma > 0.0) rep.lower = tables.lower_value(*oracle_opt) / opt_sigma;
    }
    return rep;
}

std::vector<NodeId> greedy_im(const SignedSamplePool& pool, int k) {
    check_k(pool, k);
    GreedyState state(pool, false, false);
    return greedy_rounds(pool, k, state, nullptr, 0, false, false, nullptr);
}

} // namespace oim
