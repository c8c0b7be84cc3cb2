#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace oim {

using NodeId = std::uint32_t;

struct Edge {
    NodeId src{0};
    NodeId dst{0};
    double weight{1.0};
};

struct Arc {
    NodeId to{0};
    double weight{1.0};
};

// Immutable directed graph with dense node ids 0..n-1. Edge weights are
// activation probabilities in [0,1]. Both forward and reverse adjacency are
// materialized at construction; neighbours are stored in ascending id order
// so traversal order is well defined.
class Graph {
public:
    Graph() = default;

    // Validates ids, rejects self loops, weights outside [0,1] and duplicate
    // (src,dst) pairs. The edge list is kept sorted by (src,dst).
    Graph(NodeId n, std::vector<Edge> edges);

    NodeId node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const Arc> out_arcs(NodeId u) const;
    // Arcs of the transpose: in_arcs(u) lists v with an edge v -> u, carrying
    // the weight of that original edge.
    std::span<const Arc> in_arcs(NodeId u) const;

    std::size_t out_degree(NodeId u) const { return out_arcs(u).size(); }
    std::size_t in_degree(NodeId u) const { return in_arcs(u).size(); }

    Graph transpose() const;

    double mean_edge_weight() const;

    friend bool operator==(const Graph& a, const Graph& b);

private:
    void build_adjacency();

    NodeId n_{0};
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_off_;
    std::vector<Arc> out_arcs_;
    std::vector<std::size_t> in_off_;
    std::vector<Arc> in_arcs_;
};

bool operator==(const Graph& a, const Graph& b);

// Edge list file format, one edge per line:
//   src<TAB>dst<TAB>weight
// Lines starting with '#' are comments and ignored, except that a header of
// the form "# n=K" declares the node count (needed for trailing isolated
// nodes or an edgeless graph). Malformed lines, weights outside [0,1],
// self loops, duplicate (src,dst) pairs and ids that contradict a declared
// node count all raise errors that name the offending line.
Graph load_edge_list(const std::string& path);
void save_edge_list(const Graph& g, const std::string& path);

// Assigns dense ids to externally named entities in first-seen order. The
// loaders below fall back to interning when an id column is not purely
// numeric, so sparse or string ids still come out dense.
class IdMap {
public:
    NodeId intern(const std::string& key);
    std::optional<NodeId> find(const std::string& key) const;
    const std::string& name(NodeId id) const { return names_.at(id); }
    NodeId size() const { return static_cast<NodeId>(names_.size()); }
    bool empty() const { return names_.empty(); }

private:
    std::unordered_map<std::string, NodeId> ids_;
    std::vector<std::string> names_;
};

struct RatingsTable {
    struct Entry {
        NodeId user{0};
        std::uint32_t item{0};
        double rating{0.0};
    };
    std::vector<Entry> entries;
    NodeId user_count{0};
    std::uint32_t item_count{0};
    // Declared rating range; loaders validate against it or rescale onto it.
    double scale_lo{0.0};
    double scale_hi{5.0};
};

struct LoadedRatings {
    RatingsTable table;
    // Populated only when interning was needed; empty maps mean the file used
    // dense numeric ids directly.
    IdMap users;
    IdMap items;
    bool remapped{false};
};

// CSV with rows "user,item,rating". With normalize set, ratings are min-max
// rescaled onto [0,5]; otherwise values outside [0,5] are an error.
LoadedRatings load_ratings_csv(const std::string& path, bool normalize = false);

// Connects users whose rated-item sets have Jaccard similarity strictly
// greater than threshold, with a directed edge each way. The weight is a
// placeholder to be overwritten later (by weights_from_embeddings or a
// caller-chosen constant); similarity only decides existence.
Graph build_jaccard_graph(const RatingsTable& ratings, double threshold,
                          double placeholder_weight = 1.0);

struct EmbeddingSet {
    std::size_t dim{0};
    std::unordered_map<std::uint32_t, std::vector<double>> vectors;

    bool has(std::uint32_t id) const { return vectors.count(id) != 0; }
    const std::vector<double>& at(std::uint32_t id) const;
};

// TSV with rows "id<TAB>f1<TAB>...<TAB>fd". The dimension is fixed by the
// first row. When remap is given, the id column is interned through it so the
// ids line up with a ratings table loaded from the same source.
EmbeddingSet load_embeddings_tsv(const std::string& path, IdMap* remap = nullptr);

enum class CosineMap {
    Clamp, // w = max(0, cos)
    Shift, // w = (1 + cos) / 2
};

// Re-weights every edge (u,v) of g by the mapped cosine similarity of the
// endpoint vectors. A zero-norm vector yields weight 0 for its edges; a
// missing vector is an error.
Graph weights_from_embeddings(const Graph& g, const EmbeddingSet& users,
                              CosineMap map = CosineMap::Clamp);

} // namespace oim
