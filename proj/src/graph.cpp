#include "oim/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oim {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error(msg);
}

[[noreturn]] void fail_line(const std::string& path, std::size_t line, const std::string& msg) {
    fail(path + ": " + msg + ", line " + std::to_string(line));
}

bool parse_u32(std::string_view tok, std::uint32_t& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last && !tok.empty();
}

bool parse_f64(std::string_view tok, double& out) {
    if (tok.empty()) return false;
    try {
        std::size_t used = 0;
        out = std::stod(std::string(tok), &used);
        return used == tok.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

bool is_comment_or_blank(std::string_view line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true; // blank
}

} // namespace

Graph::Graph(NodeId n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (const Edge& e : edges_) {
        if (e.src >= n_ || e.dst >= n_)
            fail("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                 ") out of range for n=" + std::to_string(n_));
        if (e.src == e.dst)
            fail("self-loop at node " + std::to_string(e.src));
        if (!(e.weight >= 0.0 && e.weight <= 1.0))
            fail("weight out of range on edge (" + std::to_string(e.src) + "," +
                 std::to_string(e.dst) + ")");
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (edges_[i - 1].src == edges_[i].src && edges_[i - 1].dst == edges_[i].dst)
            fail("duplicate edge (" + std::to_string(edges_[i].src) + "," +
                 std::to_string(edges_[i].dst) + ")");
    }
    build_adjacency();
}

void Graph::build_adjacency() {
    out_off_.assign(n_ + 1, 0);
    in_off_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
        ++out_off_[e.src + 1];
        ++in_off_[e.dst + 1];
    }
    for (NodeId u = 0; u < n_; ++u) {
        out_off_[u + 1] += out_off_[u];
        in_off_[u + 1] += in_off_[u];
    }
    out_arcs_.resize(edges_.size());
    in_arcs_.resize(edges_.size());
    std::vector<std::size_t> ocur(out_off_.begin(), out_off_.end() - 1);
    std::vector<std::size_t> icur(in_off_.begin(), in_off_.end() - 1);
    for (const Edge& e : edges_) {
        out_arcs_[ocur[e.src]++] = Arc{e.dst, e.weight};
        in_arcs_[icur[e.dst]++] = Arc{e.src, e.weight};
    }
    // edges_ is sorted by (src,dst), so forward lists are already ascending;
    // sort each reverse list so in_arcs(u) is ascending by source too.
    for (NodeId u = 0; u < n_; ++u) {
        std::sort(in_arcs_.begin() + static_cast<std::ptrdiff_t>(in_off_[u]),
                  in_arcs_.begin() + static_cast<std::ptrdiff_t>(in_off_[u + 1]),
                  [](const Arc& a, const Arc& b) { return a.to < b.to; });
    }
}

std::span<const Arc> Graph::out_arcs(NodeId u) const {
    if (u >= n_) fail("node id " + std::to_string(u) + " out of range");
    return {out_arcs_.data() + out_off_[u], out_off_[u + 1] - out_off_[u]};
}

std::span<const Arc> Graph::in_arcs(NodeId u) const {
    if (u >= n_) fail("node id " + std::to_string(u) + " out of range");
    return {in_arcs_.data() + in_off_[u], in_off_[u + 1] - in_off_[u]};
}

Graph Graph::transpose() const {
    std::vector<Edge> flipped;
    flipped.reserve(edges_.size());
    for (const Edge& e : edges_) flipped.push_back(Edge{e.dst, e.src, e.weight});
    return Graph(n_, std::move(flipped));
}

double Graph::mean_edge_weight() const {
    if (edges_.empty()) return 0.0;
    double sum = 0.0;
    for (const Edge& e : edges_) sum += e.weight;
    return sum / static_cast<double>(edges_.size());
}

bool operator==(const Graph& a, const Graph& b) {
    if (a.n_ != b.n_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
        const Edge& x = a.edges_[i];
        const Edge& y = b.edges_[i];
        if (x.src != y.src || x.dst != y.dst || x.weight != y.weight) return false;
    }
    return true;
}

Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path + ": cannot open file");

    std::vector<Edge> edges;
    std::optional<NodeId> declared_n;
    NodeId max_id = 0;
    bool saw_node = false;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = strip_cr(raw);
        if (is_comment_or_blank(line)) {
            // "# n=K" declares the node count.
            std::size_t hash = line.find('#');
            if (hash != std::string_view::npos) {
                std::string_view rest = line.substr(hash + 1);
                while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
                if (rest.rfind("n=", 0) == 0) {
                    std::uint32_t n = 0;
                    if (!parse_u32(rest.substr(2), n))
                        fail_line(path, lineno, "malformed node count header");
                    declared_n = n;
                }
            }
            continue;
        }
        auto toks = split(line, '\t');
        if (toks.size() != 3) fail_line(path, lineno, "malformed line");
        std::uint32_t src = 0, dst = 0;
        double w = 0.0;
        if (!parse_u32(toks[0], src) || !parse_u32(toks[1], dst))
            fail_line(path, lineno, "malformed line");
        if (!parse_f64(toks[2], w)) fail_line(path, lineno, "malformed line");
        if (!(w >= 0.0 && w <= 1.0)) fail_line(path, lineno, "weight out of range");
        if (src == dst) fail_line(path, lineno, "self-loop");
        edges.push_back(Edge{src, dst, w});
        max_id = std::max({max_id, src, dst});
        saw_node = true;
    }

    // Duplicate detection here (rather than in the Graph constructor) so the
    // error can cite the second occurrence's line. Cheap: recheck sorted copy.
    {
        std::vector<std::pair<NodeId, NodeId>> seen;
        seen.reserve(edges.size());
        for (const Edge& e : edges) seen.emplace_back(e.src, e.dst);
        std::sort(seen.begin(), seen.end());
        auto dup = std::adjacent_find(seen.begin(), seen.end());
        if (dup != seen.end()) {
            // Find its line by rescanning the in-memory edge order.
            std::size_t hits = 0;
            std::size_t edge_idx = 0;
            for (std::size_t i = 0; i < edges.size(); ++i) {
                if (edges[i].src == dup->first && edges[i].dst == dup->second && ++hits == 2) {
                    edge_idx = i;
                    break;
                }
            }
            // Recount physical line of that edge.
            std::ifstream again(path);
            std::size_t ln = 0, k = 0;
            while (std::getline(again, raw)) {
                ++ln;
                std::string_view l2 = strip_cr(raw);
                if (is_comment_or_blank(l2)) continue;
                if (k++ == edge_idx) break;
            }
            fail_line(path, ln, "duplicate edge (" + std::to_string(dup->first) + "," +
                                    std::to_string(dup->second) + ")");
        }
    }

    NodeId n = saw_node ? max_id + 1 : 0;
    if (declared_n) {
        if (saw_node && *declared_n <= max_id)
            fail(path + ": node id " + std::to_string(max_id) +
                 " contradicts declared n=" + std::to_string(*declared_n));
        n = *declared_n;
    }
    return Graph(n, std::move(edges));
}

void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(path + ": cannot open file for writing");
    out << "# n=" << g.node_count() << "\n";
    out.precision(17);
    for (const Edge& e : g.edges()) out << e.src << '\t' << e.dst << '\t' << e.weight << '\n';
    if (!out) fail(path + ": write failed");
}

NodeId IdMap::intern(const std::string& key) {
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    NodeId id = static_cast<NodeId>(names_.size());
    ids_.emplace(key, id);
    names_.push_back(key);
    return id;
}

std::optional<NodeId> IdMap::find(const std::string& key) const {
    auto it = ids_.find(key);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

LoadedRatings load_ratings_csv(const std::string& path, bool normalize) {
    std::ifstream in(path);
    if (!in) fail(path + ": cannot open file");

    struct RawRow {
        std::string user, item;
        double rating;
        std::size_t line;
    };
    std::vector<RawRow> rows;
    bool numeric_ids = true;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = strip_cr(raw);
        if (is_comment_or_blank(line)) continue;
        auto toks = split(line, ',');
        if (toks.size() != 3) fail_line(path, lineno, "malformed line");
        double r = 0.0;
        if (!parse_f64(toks[2], r)) fail_line(path, lineno, "malformed rating");
        if (!std::isfinite(r)) fail_line(path, lineno, "malformed rating");
        std::uint32_t tmp = 0;
        if (!parse_u32(toks[0], tmp) || !parse_u32(toks[1], tmp)) numeric_ids = false;
        rows.push_back(RawRow{std::string(toks[0]), std::string(toks[1]), r, lineno});
    }

    LoadedRatings out;
    out.remapped = !numeric_ids;
    for (const RawRow& row : rows) {
        RatingsTable::Entry e;
        if (numeric_ids) {
            std::uint32_t u = 0, i = 0;
            parse_u32(row.user, u);
            parse_u32(row.item, i);
            e.user = u;
            e.item = i;
        } else {
            e.user = out.users.intern(row.user);
            e.item = out.items.intern(row.item);
        }
        e.rating = row.rating;
        out.table.entries.push_back(e);
        out.table.user_count = std::max(out.table.user_count, e.user + 1);
        out.table.item_count = std::max(out.table.item_count, e.item + 1);
    }

    if (normalize && !out.table.entries.empty()) {
        double lo = out.table.entries.front().rating;
        double hi = lo;
        for (const auto& e : out.table.entries) {
            lo = std::min(lo, e.rating);
            hi = std::max(hi, e.rating);
        }
        for (auto& e : out.table.entries)
            e.rating = hi > lo ? (e.rating - lo) / (hi - lo) * 5.0 : 0.0;
    } else {
        for (const auto& e : out.table.entries) {
            if (e.rating < out.table.scale_lo || e.rating > out.table.scale_hi)
                fail(path + ": rating " + std::to_string(e.rating) +
                     " outside declared range [0,5]; pass normalize to rescale");
        }
    }
    return out;
}

Graph build_jaccard_graph(const RatingsTable& ratings, double threshold,
                          double placeholder_weight) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        fail("jaccard threshold must lie in (0,1]");

    NodeId n = ratings.user_count;
    // Distinct item sets per user.
    std::vector<std::vector<std::uint32_t>> items(n);
    for (const auto& e : ratings.entries) items[e.user].push_back(e.item);
    for (auto& v : items) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    // Count common items through the item -> raters index; only co-rating
    // pairs are ever touched, which is what makes this viable on real tables.
    std::vector<std::vector<NodeId>> raters(ratings.item_count);
    for (NodeId u = 0; u < n; ++u)
        for (std::uint32_t it : items[u]) raters[it].push_back(u);

    std::unordered_map<std::uint64_t, std::uint32_t> common;
    for (const auto& rs : raters) {
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = i + 1; j < rs.size(); ++j) {
                std::uint64_t key = (static_cast<std::uint64_t>(rs[i]) << 32) | rs[j];
                ++common[key];
            }
    }

    std::vector<Edge> edges;
    for (const auto& [key, inter] : common) {
        NodeId a = static_cast<NodeId>(key >> 32);
        NodeId b = static_cast<NodeId>(key & 0xffffffffu);
        double uni = static_cast<double>(items[a].size() + items[b].size() - inter);
        double jac = uni > 0.0 ? static_cast<double>(inter) / uni : 0.0;
        if (jac > threshold) {
            edges.push_back(Edge{a, b, placeholder_weight});
            edges.push_back(Edge{b, a, placeholder_weight});
        }
    }
    return Graph(n, std::move(edges));
}

const std::vector<double>& EmbeddingSet::at(std::uint32_t id) const {
    auto it = vectors.find(id);
    if (it == vectors.end())
        fail("no embedding vector for id " + std::to_string(id));
    return it->second;
}

EmbeddingSet load_embeddings_tsv(const std::string& path, IdMap* remap) {
    std::ifstream in(path);
    if (!in) fail(path + ": cannot open file");

    EmbeddingSet out;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = strip_cr(raw);
        if (is_comment_or_blank(line)) continue;
        auto toks = split(line, '\t');
        if (toks.size() < 2) fail_line(path, lineno, "malformed line");

        std::uint32_t id = 0;
        if (remap) {
            id = remap->intern(std::string(toks[0]));
        } else if (!parse_u32(toks[0], id)) {
            fail_line(path, lineno, "non-numeric id without a remap table");
        }

        std::vector<double> vec(toks.size() - 1);
        for (std::size_t i = 1; i < toks.size(); ++i) {
            if (!parse_f64(toks[i], vec[i - 1]) || !std::isfinite(vec[i - 1]))
                fail_line(path, lineno, "malformed component");
        }
        if (out.dim == 0) out.dim = vec.size();
        if (vec.size() != out.dim) fail_line(path, lineno, "dimension mismatch");
        if (!out.vectors.emplace(id, std::move(vec)).second)
            fail_line(path, lineno, "duplicate id");
    }
    return out;
}

Graph weights_from_embeddings(const Graph& g, const EmbeddingSet& users, CosineMap map) {
    std::vector<double> norms(g.node_count(), -1.0);
    auto norm_of = [&](NodeId u) {
        if (norms[u] < 0.0) {
            const auto& v = users.at(u);
            double s = 0.0;
            for (double x : v) s += x * x;
            norms[u] = std::sqrt(s);
        }
        return norms[u];
    };

    std::vector<Edge> edges;
    edges.reserve(g.edge_count());
    for (const Edge& e : g.edges()) {
        const auto& a = users.at(e.src);
        const auto& b = users.at(e.dst);
        if (a.size() != b.size()) fail("embedding dimension mismatch");
        double na = norm_of(e.src);
        double nb = norm_of(e.dst);
        double w = 0.0;
        if (na > 0.0 && nb > 0.0) {
            double dot = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
            double cos = dot / (na * nb);
            cos = std::clamp(cos, -1.0, 1.0);
            w = map == CosineMap::Clamp ? std::max(0.0, cos) : (1.0 + cos) / 2.0;
        }
        edges.push_back(Edge{e.src, e.dst, w});
    }
    return Graph(g.node_count(), std::move(edges));
}

} // namespace oim
