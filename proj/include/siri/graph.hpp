#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "siri/errors.hpp"
#include "siri/tensor.hpp"

namespace siri {

// Undirected simple graph. Edges are stored canonically with u < v,
// no self-loops, no duplicates. Node features are optional (n x d0).
class Graph {
public:
    Graph() = default;

    explicit Graph(int n) : n_(n) {
        if (n < 1) throw ValidationError("Graph: n must be >= 1");
    }

    static Graph from_edges(int n, std::vector<std::pair<int, int>> edges) {
        Graph g(n);
        for (auto [u, v] : edges) g.add_edge(u, v);
        return g;
    }

    int num_nodes() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    void add_edge(int u, int v) {
        if (u == v) throw ValidationError("edge: self-loop at node " + std::to_string(u));
        if (u < 0 || v < 0 || u >= n_ || v >= n_)
            throw ValidationError("edge: index out of range (" + std::to_string(u) + "," + std::to_string(v) + ")");
        if (u > v) std::swap(u, v);
        if (has_edge(u, v)) throw ValidationError("edge: duplicate (" + std::to_string(u) + "," + std::to_string(v) + ")");
        edges_.emplace_back(u, v);
        adjacency_dirty_ = true;
    }

    bool has_edge(int u, int v) const {
        if (u > v) std::swap(u, v);
        return std::find(edges_.begin(), edges_.end(), std::make_pair(u, v)) != edges_.end();
    }

    // Sorted canonical edge list, u < v.
    const std::vector<std::pair<int, int>>& edges() const {
        if (adjacency_dirty_) rebuild();
        return edges_;
    }

    const std::vector<std::vector<int>>& adjacency() const {
        if (adjacency_dirty_) rebuild();
        return adjacency_;
    }

    const std::vector<int>& neighbors(int v) const { return adjacency()[v]; }

    int degree(int v) const { return static_cast<int>(adjacency()[v].size()); }

    bool has_features() const { return features_.has_value(); }

    const Tensor& features() const {
        if (!features_) throw ValidationError("graph has no features");
        return *features_;
    }

    int feature_dim() const { return features_ ? features_->cols : 0; }

    void set_features(Tensor x) {
        if (x.rows != n_)
            throw ValidationError("features: row count " + std::to_string(x.rows) + " != n " + std::to_string(n_));
        features_ = std::move(x);
    }

    // Relabels nodes: node v of this graph becomes perm[v] in the result.
    Graph permuted(const std::vector<int>& perm) const {
        if (static_cast<int>(perm.size()) != n_) throw ValidationError("permuted: permutation length != n");
        Graph out(n_);
        for (auto [u, v] : edges_) out.add_edge(perm[u], perm[v]);
        if (features_) {
            Tensor x(n_, features_->cols);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < features_->cols; ++j) x.at(perm[i], j) = features_->at(i, j);
            out.set_features(std::move(x));
        }
        return out;
    }

    bool operator==(const Graph& o) const {
        if (n_ != o.n_) return false;
        auto a = edges_;
        auto b = o.edges_;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    }

private:
    void rebuild() const {
        std::sort(edges_.begin(), edges_.end());
        adjacency_.assign(n_, {});
        for (auto [u, v] : edges_) {
            adjacency_[u].push_back(v);
            adjacency_[v].push_back(u);
        }
        adjacency_dirty_ = false;
    }

    int n_ = 1;
    mutable std::vector<std::pair<int, int>> edges_;
    mutable std::vector<std::vector<int>> adjacency_;
    mutable bool adjacency_dirty_ = true;
    std::optional<Tensor> features_;
};

// Per-node boolean labels.
struct NodeLabeling {
    std::vector<bool> labels;

    int count_true() const { return static_cast<int>(std::count(labels.begin(), labels.end(), true)); }
    bool operator==(const NodeLabeling& o) const { return labels == o.labels; }
};

// labels[v] = true iff v lies on a triangle. Exhaustive over adjacent pairs
// of neighbors; this is the exact combinatorial oracle.
inline NodeLabeling label_triangles(const Graph& g) {
    const int n = g.num_nodes();
    NodeLabeling out;
    out.labels.assign(n, false);
    for (auto [u, v] : g.edges()) {
        for (int w : g.neighbors(u)) {
            if (w == v) continue;
            if (g.has_edge(w, v)) {
                out.labels[u] = true;
                out.labels[v] = true;
                out.labels[w] = true;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format, one graph per file:
//   graph <n> <num_edges> <d0>
//   <u> <v>              (num_edges lines, u < v)
//   <d0 reals per line>  (n lines, only if d0 > 0)

inline void write_graph(const Graph& g, std::ostream& os) {
    const int d0 = g.feature_dim();
    os << "graph " << g.num_nodes() << ' ' << g.num_edges() << ' ' << d0 << '\n';
    for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
    if (d0 > 0) {
        os.precision(17);
        for (int i = 0; i < g.num_nodes(); ++i) {
            for (int j = 0; j < d0; ++j) os << (j ? " " : "") << g.features().at(i, j);
            os << '\n';
        }
    }
}

inline void write_graph(const Graph& g, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    write_graph(g, os);
}

inline Graph read_graph(std::istream& is, const std::string& origin = "<stream>") {
    int line_no = 0;
    std::string line;
    auto next_line = [&]() -> std::string& {
        if (!std::getline(is, line)) throw ParseError(line_no + 1, "unexpected end of file in " + origin);
        ++line_no;
        return line;
    };

    std::istringstream header(next_line());
    std::string magic;
    int n = 0, m = 0, d0 = 0;
    if (!(header >> magic >> n >> m >> d0) || magic != "graph")
        throw ParseError(line_no, "expected 'graph <n> <num_edges> <d0>'");
    if (n < 1) throw ParseError(line_no, "node count must be >= 1");
    if (m < 0 || d0 < 0) throw ParseError(line_no, "negative count in header");

    Graph g(n);
    for (int e = 0; e < m; ++e) {
        std::istringstream ls(next_line());
        int u = 0, v = 0;
        if (!(ls >> u >> v)) throw ParseError(line_no, "expected '<u> <v>'");
        if (u >= v) throw ParseError(line_no, "edges must satisfy u < v");
        try {
            g.add_edge(u, v);
        } catch (const ValidationError& err) {
            throw ParseError(line_no, err.what());
        }
    }
    if (d0 > 0) {
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(n) * d0);
        for (int i = 0; i < n; ++i) {
            std::istringstream ls(next_line());
            for (int j = 0; j < d0; ++j) {
                double v = 0.0;
                if (!(ls >> v)) throw ParseError(line_no, "expected " + std::to_string(d0) + " feature values");
                values.push_back(v);
            }
        }
        try {
            g.set_features(Tensor::from_external(n, d0, std::move(values), "features"));
        } catch (const NumericError& err) {
            throw ParseError(line_no, err.what());
        }
    }
    return g;
}

inline Graph read_graph(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open: " + path);
    return read_graph(is, path);
}

}  // namespace siri
