#include "oim/rr.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <type_traits>

#include "oim/parallel.hpp"
#include "oim/rng.hpp"

namespace oim {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error(msg);
}

// Reverse BFS with lazy edge coins; stamp/epoch lets workers reuse buffers.
void rr_bfs(const Graph& g, NodeId root, std::mt19937_64& rng,
            std::vector<std::uint32_t>& stamp, std::uint32_t epoch, std::vector<NodeId>& out) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    out.clear();
    out.push_back(root);
    stamp[root] = epoch;
    std::size_t head = 0;
    while (head < out.size()) {
        NodeId u = out[head++];
        for (const Arc& a : g.in_arcs(u)) {
            if (stamp[a.to] == epoch) continue;
            if (coin(rng) < a.weight) {
                stamp[a.to] = epoch;
                out.push_back(a.to);
            }
        }
    }
    std::sort(out.begin(), out.end());
}

} // namespace

std::int64_t sample_count(NodeId n, int k, double epsilon, double delta) {
    if (n < 2) fail("sample_count requires n >= 2");
    if (k < 1) fail("sample_count requires k >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0,1)");
    double num = (static_cast<double>(k) + 1.0) * std::log(static_cast<double>(n)) +
                 std::log(2.0 / delta);
    return static_cast<std::int64_t>(std::ceil(num / (2.0 * epsilon * epsilon)));
}

SamplingPlan make_plan(NodeId n, int k, double epsilon, double delta, SampleMode mode) {
    SamplingPlan plan;
    plan.epsilon = epsilon;
    plan.delta = delta;
    plan.k = k;
    plan.mode = mode;
    plan.l = sample_count(n, k, epsilon, delta);
    return plan;
}

std::vector<NodeId> sample_rr_set(const Graph& g, NodeId root, std::uint64_t rng_seed) {
    if (root >= g.node_count()) fail("root node " + std::to_string(root) + " out of range");
    std::mt19937_64 rng(rng_seed);
    std::vector<std::uint32_t> stamp(g.node_count(), 0);
    std::vector<NodeId> out;
    rr_bfs(g, root, rng, stamp, 1, out);
    return out;
}

SignedSamplePool::SignedSamplePool(NodeId n, double scale, std::vector<RrSample> samples,
                                   SampleMode mode, std::int64_t l)
    : n_(n), scale_(scale), mode_(mode), l_(l), samples_(std::move(samples)) {
    for (const RrSample& s : samples_) {
        if (s.root >= n_) fail("sample root out of range");
        for (NodeId v : s.members)
            if (v >= n_) fail("sample member out of range");
    }
    build_index();
}

void SignedSamplePool::build_index() {
    index_off_.assign(n_ + 1, 0);
    for (const RrSample& s : samples_)
        for (NodeId v : s.members) ++index_off_[v + 1];
    for (NodeId u = 0; u < n_; ++u) index_off_[u + 1] += index_off_[u];
    index_.resize(index_off_[n_]);
    std::vector<std::size_t> cur(index_off_.begin(), index_off_.end() - 1);
    for (std::uint32_t i = 0; i < samples_.size(); ++i)
        for (NodeId v : samples_[i].members) index_[cur[v]++] = i;
}

std::span<const std::uint32_t> SignedSamplePool::samples_containing(NodeId v) const {
    if (v >= n_) fail("node id " + std::to_string(v) + " out of range");
    return {index_.data() + index_off_[v], index_off_[v + 1] - index_off_[v]};
}

SignedSamplePool SignedSamplePool::build(const Graph& g, const OpinionPartition& part,
                                         const SamplingPlan& plan, std::uint64_t master_seed,
                                         int threads) {
    if (part.size() != g.node_count()) fail("opinion partition size does not match graph");
    if (plan.l < 1) fail("sampling plan needs l >= 1");
    const std::vector<NodeId>& roots = part.signed_set();
    if (roots.empty())
        fail("no positive or negative nodes: objective identically zero");

    if (plan.mode == SampleMode::RootSample) {
        std::vector<RrSample> samples(static_cast<std::size_t>(plan.l));
        parallel_chunks(plan.l, [&](int, std::int64_t begin, std::int64_t end) {
            std::vector<std::uint32_t> stamp(g.node_count(), 0);
            std::uint32_t epoch = 0;
            for (std::int64_t i = begin; i < end; ++i) {
                std::mt19937_64 rng = make_engine(master_seed, static_cast<std::uint64_t>(i));
                std::uniform_int_distribution<std::size_t> pick(0, roots.size() - 1);
                NodeId root = roots[pick(rng)];
                RrSample& s = samples[static_cast<std::size_t>(i)];
                s.root = root;
                s.sign = part.label(root);
                rr_bfs(g, root, rng, stamp, ++epoch, s.members);
            }
        }, threads);
        double scale = static_cast<double>(roots.size()) / static_cast<double>(plan.l);
        return SignedSamplePool(g.node_count(), scale, std::move(samples), plan.mode, plan.l);
    }

    // World mode: per world, draw liveness for every edge once (in canonical
    // edge order), then take the reverse reach set of every signed root in
    // that world. Samples land at world * |roots| + root_index, so layout is
    // deterministic under any thread count.
    const std::vector<Edge>& edges = g.edges();
    std::vector<RrSample> samples(static_cast<std::size_t>(plan.l) * roots.size());
    parallel_chunks(plan.l, [&](int, std::int64_t begin, std::int64_t end) {
        std::vector<std::uint8_t> live(edges.size());
        std::vector<std::vector<Arc>> live_in(g.node_count());
        std::vector<std::uint32_t> stamp(g.node_count(), 0);
        std::uint32_t epoch = 0;
        for (std::int64_t w = begin; w < end; ++w) {
            std::mt19937_64 rng = make_engine(master_seed, static_cast<std::uint64_t>(w));
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            for (std::size_t e = 0; e < edges.size(); ++e)
                live[e] = coin(rng) < edges[e].weight ? 1 : 0;
            for (auto& v : live_in) v.clear();
            for (std::size_t e = 0; e < edges.size(); ++e)
                if (live[e]) live_in[edges[e].dst].push_back(Arc{edges[e].src, 1.0});

            for (std::size_t r = 0; r < roots.size(); ++r) {
                NodeId root = roots[r];
                RrSample& s = samples[static_cast<std::size_t>(w) * roots.size() + r];
                s.root = root;
                s.sign = part.label(root);
                // Deterministic reach on the fixed live set.
                s.members.clear();
                s.members.push_back(root);
                stamp[root] = ++epoch;
                std::size_t head = 0;
                while (head < s.members.size()) {
                    NodeId u = s.members[head++];
                    for (const Arc& a : live_in[u]) {
                        if (stamp[a.to] != epoch) {
                            stamp[a.to] = epoch;
                            s.members.push_back(a.to);
                        }
                    }
                }
                std::sort(s.members.begin(), s.members.end());
            }
        }
    }, threads);
    double scale = 1.0 / static_cast<double>(plan.l);
    return SignedSamplePool(g.node_count(), scale, std::move(samples), plan.mode, plan.l);
}

SignedSamplePool SignedSamplePool::build_unsigned(const Graph& g, const SamplingPlan& plan,
                                                  std::uint64_t master_seed, int threads) {
    if (plan.l < 1) fail("sampling plan needs l >= 1");
    if (g.node_count() == 0) fail("empty graph");
    std::vector<RrSample> samples(static_cast<std::size_t>(plan.l));
    parallel_chunks(plan.l, [&](int, std::int64_t begin, std::int64_t end) {
        std::vector<std::uint32_t> stamp(g.node_count(), 0);
        std::uint32_t epoch = 0;
        for (std::int64_t i = begin; i < end; ++i) {
            std::mt19937_64 rng = make_engine(master_seed, static_cast<std::uint64_t>(i));
            std::uniform_int_distribution<NodeId> pick(0, g.node_count() - 1);
            NodeId root = pick(rng);
            RrSample& s = samples[static_cast<std::size_t>(i)];
            s.root = root;
            s.sign = 1;
            rr_bfs(g, root, rng, stamp, ++epoch, s.members);
        }
    }, threads);
    double scale = static_cast<double>(g.node_count()) / static_cast<double>(plan.l);
    return SignedSamplePool(g.node_count(), scale, std::move(samples), plan.mode, plan.l);
}

std::pair<std::int64_t, std::int64_t>
SignedSamplePool::coverage_counts(std::span<const NodeId> S) const {
    std::vector<std::uint8_t> covered = coverage_of(S);
    std::int64_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!covered[i]) continue;
        if (samples_[i].sign > 0) ++pos;
        else ++neg;
    }
    return {pos, neg};
}

std::vector<std::uint8_t> SignedSamplePool::coverage_of(std::span<const NodeId> S) const {
    std::vector<std::uint8_t> covered(samples_.size(), 0);
    for (NodeId v : S)
        for (std::uint32_t i : samples_containing(v)) covered[i] = 1;
    return covered;
}

SigmaValue SignedSamplePool::estimate_sigma(std::span<const NodeId> S) const {
    auto [pos, neg] = coverage_counts(S);
    SigmaValue sv;
    sv.pos = scale_ * static_cast<double>(pos);
    sv.neg = scale_ * static_cast<double>(neg);
    sv.net = scale_ * static_cast<double>(pos - neg);
    return sv;
}

double SignedSamplePool::marginal_gain(NodeId v, const std::vector<std::uint8_t>& covered) const {
    if (covered.size() != samples_.size()) fail("coverage state size mismatch");
    std::int64_t gain = 0;
    for (std::uint32_t i : samples_containing(v)) {
        if (covered[i]) continue;
        gain += samples_[i].sign > 0 ? 1 : -1;
    }
    return scale_ * static_cast<double>(gain);
}

namespace {

constexpr char kPoolMagic[5] = {'O', 'I', 'M', 'P', '1'};

template <typename T>
void put(std::ofstream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    // Written little-endian; this code targets little-endian hosts.
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

} // namespace

void SignedSamplePool::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path + ": cannot open file for writing");
    out.write(kPoolMagic, sizeof(kPoolMagic));
    put<std::uint32_t>(out, n_);
    put<std::uint8_t>(out, mode_ == SampleMode::World ? 1 : 0);
    put<std::int64_t>(out, l_);
    put<double>(out, scale_);
    put<std::uint64_t>(out, samples_.size());
    for (const RrSample& s : samples_) {
        put<std::uint32_t>(out, s.root);
        put<std::int8_t>(out, s.sign);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(s.members.size()));
        for (NodeId v : s.members) put<std::uint32_t>(out, v);
    }
    if (!out) fail(path + ": write failed");
}

SignedSamplePool SignedSamplePool::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path + ": cannot open file");
    char magic[5];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kPoolMagic, sizeof(magic)) != 0)
        fail(path + ": not a pool file (bad magic)");
    auto n = get<std::uint32_t>(in);
    auto mode = get<std::uint8_t>(in) == 1 ? SampleMode::World : SampleMode::RootSample;
    auto l = get<std::int64_t>(in);
    auto scale = get<double>(in);
    auto count = get<std::uint64_t>(in);
    if (!in) fail(path + ": truncated pool file");
    std::vector<RrSample> samples(count);
    for (auto& s : samples) {
        s.root = get<std::uint32_t>(in);
        s.sign = get<std::int8_t>(in);
        auto sz = get<std::uint32_t>(in);
        if (!in) fail(path + ": truncated pool file");
        s.members.resize(sz);
        for (auto& v : s.members) v = get<std::uint32_t>(in);
    }
    if (!in) fail(path + ": truncated pool file");
    return SignedSamplePool(n, scale, std::move(samples), mode, l);
}

} // namespace oim
