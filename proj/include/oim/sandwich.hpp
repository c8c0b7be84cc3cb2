#pragma once

#include <optional>
#include <string>

#include "oim/rr.hpp"

namespace oim {

// Modular bounds around the pool objective, anchored at the empty set. For
// the positive (and separately negative) coverage function:
//   upper side: sum of singleton values, valid by subadditivity;
//   lower side: permutation chain gains g(pi_i) = f(prefix_i) - f(prefix_{i-1})
//     along pi ordered by descending singleton value (ties ascending id).
// The signed bounds cross sides so both bracket the signed objective:
//   upper(S) = sum_{v in S} singleton_pos(v) - chain_neg(v)
//   lower(S) = sum_{v in S} chain_pos(v)     - singleton_neg(v)
// All stored as integer sample counts; multiply by pool scale on evaluation,
// so bracket comparisons against pool estimates are exact.
struct BoundTables {
    double scale{1.0};
    std::vector<std::int64_t> singleton_pos, singleton_neg; // per node, counts
    std::vector<std::int64_t> chain_pos, chain_neg;         // per node, counts
    std::vector<NodeId> perm_pos, perm_neg;

    double upper_value(std::span<const NodeId> S) const;
    double lower_value(std::span<const NodeId> S) const;
    std::int64_t upper_count(std::span<const NodeId> S) const;
    std::int64_t lower_count(std::span<const NodeId> S) const;
};

BoundTables build_bound_tables(const SignedSamplePool& pool);

struct SandwichOptions {
    // Rebuild the bound-derived gains against the already-chosen prefix each
    // round instead of keeping the empty-set anchor.
    bool adaptive_bounds{false};
    // Return the best prefix of any chain by pool sigma instead of forcing
    // exactly k seeds; may return fewer than k (even zero) seeds.
    bool best_prefix{false};
};

struct SandwichResult {
    // Chains in selection order, each of length exactly k.
    std::vector<NodeId> chain_mid, chain_upper, chain_lower;
    std::vector<double> mid_step_gains;
    SigmaValue sigma_mid, sigma_upper, sigma_lower;
    // Winner by pool sigma; ties resolved middle, then upper, then lower.
    std::vector<NodeId> returned;
    double sigma_returned{0.0};
    std::string winner; // "middle", "upper" or "lower"
};

// Three k-round chains over the shared sample pool: an adaptive greedy on the
// pool marginal gain plus the exact top-k sets of both modular bounds. Each
// chain adds exactly k nodes even when every remaining gain is negative; the
// best of the three by pool sigma is returned.
SandwichResult sandwich_greedy(const SignedSamplePool& pool, int k, const BoundTables& tables,
                               const SandwichOptions& options = {});

struct RatioReport {
    // sigma(upper chain) / upper_bound(upper chain), absent unless the
    // denominator is positive.
    std::optional<double> upper;
    // lower_bound(S*) / sigma(S*), absent unless an optimum S* was supplied
    // with positive pool sigma.
    std::optional<double> lower;
};

RatioReport ratio_report(const SignedSamplePool& pool, const SandwichResult& result,
                         const BoundTables& tables,
                         std::optional<std::span<const NodeId>> oracle_opt = std::nullopt);

// Classic opinion-blind greedy max coverage, for the IM baseline. Expects a
// pool built over all roots (build_unsigned).
std::vector<NodeId> greedy_im(const SignedSamplePool& pool, int k);

} // namespace oim
