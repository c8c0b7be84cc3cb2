#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oim/graph.hpp"
#include "oim/opinion.hpp"

namespace oim {

enum class SampleMode {
    // l roots drawn uniformly with replacement from the signed nodes, one
    // reverse-reachable set each; scale = |signed| / l.
    RootSample,
    // l live-edge worlds, one reverse-reachable set per signed node per
    // world; scale = 1 / l.
    World,
};

// Number of samples sufficient for a two-sided Hoeffding bound over all
// size-<=k seed sets: ceil(((k+1) ln n + ln(2/delta)) / (2 eps^2)).
std::int64_t sample_count(NodeId n, int k, double epsilon, double delta);

struct SamplingPlan {
    double epsilon{0.15};
    double delta{0.01};
    int k{1};
    std::int64_t l{1};
    SampleMode mode{SampleMode::RootSample};
};

SamplingPlan make_plan(NodeId n, int k, double epsilon, double delta,
                       SampleMode mode = SampleMode::RootSample);

// Reverse-reachable set of root: a reverse BFS on the transpose where each
// incoming edge is kept with its weight, resolved lazily at first encounter.
// Always contains the root; ascending order. Deterministic given rng_seed.
std::vector<NodeId> sample_rr_set(const Graph& g, NodeId root, std::uint64_t rng_seed);

struct RrSample {
    NodeId root{0};
    std::int8_t sign{1}; // label of the root
    std::vector<NodeId> members;
};

struct SigmaValue {
    double pos{0.0};
    double neg{0.0};
    double net{0.0};
};

// A pool of signed reverse-reachable samples with an inverted node->samples
// index. Immutable after build; estimates are pure reads. All sigma values
// are scale times integer hit counts, so comparisons against bound tables
// built from the same pool are exact.
class SignedSamplePool {
public:
    // Roots come from part.signed_set(); throws "objective identically zero"
    // when that set is empty. Sample/world i uses mix_seed(master_seed, i).
    static SignedSamplePool build(const Graph& g, const OpinionPartition& part,
                                  const SamplingPlan& plan, std::uint64_t master_seed,
                                  int threads = 0);

    // Opinion-blind variant for the classic-IM baseline: roots drawn from all
    // n nodes, every sample positive, scale = n / l.
    static SignedSamplePool build_unsigned(const Graph& g, const SamplingPlan& plan,
                                           std::uint64_t master_seed, int threads = 0);

    // Hand-constructed pools, used by tests and the load path.
    SignedSamplePool(NodeId n, double scale, std::vector<RrSample> samples,
                     SampleMode mode = SampleMode::RootSample, std::int64_t l = 0);

    NodeId node_count() const { return n_; }
    double scale() const { return scale_; }
    SampleMode mode() const { return mode_; }
    std::int64_t plan_l() const { return l_; }
    std::size_t size() const { return samples_.size(); }
    const RrSample& sample(std::size_t i) const { return samples_[i]; }
    const std::vector<RrSample>& samples() const { return samples_; }
    std::span<const std::uint32_t> samples_containing(NodeId v) const;

    SigmaValue estimate_sigma(std::span<const NodeId> S) const;

    // Signed hit counts (positive samples intersecting S, negative ditto);
    // the integer core of estimate_sigma.
    std::pair<std::int64_t, std::int64_t> coverage_counts(std::span<const NodeId> S) const;

    // One byte per sample, 1 when the sample intersects S.
    std::vector<std::uint8_t> coverage_of(std::span<const NodeId> S) const;

    // sigma(S + v) - sigma(S) given S's coverage bytes. Zero when v only hits
    // already-covered samples (in particular when v is in S).
    double marginal_gain(NodeId v, const std::vector<std::uint8_t>& covered) const;

    // Binary pool format "OIMP1": little-endian, 32-bit node ids,
    // length-prefixed member arrays.
    void save(const std::string& path) const;
    static SignedSamplePool load(const std::string& path);

private:
    void build_index();

    NodeId n_{0};
    double scale_{1.0};
    SampleMode mode_{SampleMode::RootSample};
    std::int64_t l_{0};
    std::vector<RrSample> samples_;
    std::vector<std::size_t> index_off_;
    std::vector<std::uint32_t> index_;
};

} // namespace oim
