#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "siri/errors.hpp"
#include "siri/graph.hpp"
#include "siri/rng.hpp"

namespace siri {

enum class GraphKind {
    BarabasiAlbert,
    Cycle,
    DisjointCycles,
    CircularSkipLink,
    Shrikhande,
    Rook4x4,
    Complete,
};

inline GraphKind graph_kind_from_string(const std::string& s) {
    if (s == "barabasi-albert" || s == "ba") return GraphKind::BarabasiAlbert;
    if (s == "cycle") return GraphKind::Cycle;
    if (s == "disjoint-cycles") return GraphKind::DisjointCycles;
    if (s == "circular-skip-link" || s == "csl") return GraphKind::CircularSkipLink;
    if (s == "shrikhande") return GraphKind::Shrikhande;
    if (s == "rook-4x4") return GraphKind::Rook4x4;
    if (s == "complete") return GraphKind::Complete;
    throw ValidationError("kind: unknown generator '" + s + "'");
}

struct GeneratorSpec {
    GraphKind kind = GraphKind::Cycle;
    int n = 6;
    int m = 2;             // BA attachment parameter
    int skip = 2;          // CSL skip length
    std::uint64_t seed = 0;
};

namespace detail {

// Preferential attachment: start from a complete graph on m+1 nodes, then each
// new node attaches m edges to distinct existing nodes with probability
// proportional to current degree (sampled without replacement).
inline Graph barabasi_albert(int n, int m, std::uint64_t seed) {
    if (m < 1) throw ValidationError("m: must be >= 1");
    if (m >= n) throw ValidationError("m: must satisfy m < n");
    Rng rng(seed);
    Graph g(n);
    std::vector<int> degree(n, 0);
    for (int u = 0; u <= m; ++u)
        for (int v = u + 1; v <= m; ++v) {
            g.add_edge(u, v);
            ++degree[u];
            ++degree[v];
        }
    std::vector<int> chosen;
    for (int t = m + 1; t < n; ++t) {
        chosen.clear();
        std::vector<double> weight(degree.begin(), degree.begin() + t);
        for (int pick = 0; pick < m; ++pick) {
            double total = std::accumulate(weight.begin(), weight.end(), 0.0);
            double x = rng.uniform01() * total;
            int sel = 0;
            for (; sel < t - 1; ++sel) {
                x -= weight[sel];
                if (x < 0.0) break;
            }
            chosen.push_back(sel);
            weight[sel] = 0.0;  // without replacement
        }
        for (int v : chosen) {
            g.add_edge(t, v);
            ++degree[t];
            ++degree[v];
        }
    }
    return g;
}

inline Graph cycle(int n) {
    if (n < 3) throw ValidationError("n: cycle needs n >= 3");
    Graph g(n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

// Two disjoint cycles of n/2 nodes each.
inline Graph disjoint_cycles(int n) {
    if (n < 6 || n % 2 != 0) throw ValidationError("n: disjoint-cycles needs even n >= 6");
    const int half = n / 2;
    Graph g(n);
    for (int i = 0; i < half; ++i) g.add_edge(i, (i + 1) % half);
    for (int i = 0; i < half; ++i) g.add_edge(half + i, half + (i + 1) % half);
    return g;
}

inline Graph circular_skip_link(int n, int skip) {
    if (n < 5) throw ValidationError("n: csl needs n >= 5");
    if (skip < 2 || 2 * skip > n) throw ValidationError("skip: must satisfy 2 <= skip <= n/2");
    if (std::gcd(n, skip) != 1) throw ValidationError("skip: must be coprime with n");
    Graph g(n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    for (int i = 0; i < n; ++i) {
        int j = (i + skip) % n;
        if (!g.has_edge(i, j)) g.add_edge(i, j);
    }
    return g;
}

// Cayley graph on Z4 x Z4 with difference set {+-(1,0), +-(0,1), +-(1,1)}:
// the Shrikhande graph, SRG(16, 6, 2, 2).
inline Graph shrikhande() {
    Graph g(16);
    auto id = [](int a, int b) { return ((a & 3) << 2) | (b & 3); };
    const int diffs[3][2] = {{1, 0}, {0, 1}, {1, 1}};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (auto& d : diffs) {
                int u = id(a, b), v = id(a + d[0], b + d[1]);
                if (!g.has_edge(u, v)) g.add_edge(u, v);
            }
    return g;
}

// 4x4 rook's graph: vertices (i,j), adjacent iff same row or same column.
// The other SRG(16, 6, 2, 2).
inline Graph rook_4x4() {
    Graph g(16);
    auto id = [](int i, int j) { return i * 4 + j; };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            for (int k = j + 1; k < 4; ++k) g.add_edge(id(i, j), id(i, k));
            for (int k = i + 1; k < 4; ++k) g.add_edge(id(i, j), id(k, j));
        }
    return g;
}

inline Graph complete(int n) {
    if (n < 1) throw ValidationError("n: complete needs n >= 1");
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
}

}  // namespace detail

inline Graph generate(const GeneratorSpec& spec) {
    switch (spec.kind) {
        case GraphKind::BarabasiAlbert: return detail::barabasi_albert(spec.n, spec.m, spec.seed);
        case GraphKind::Cycle: return detail::cycle(spec.n);
        case GraphKind::DisjointCycles: return detail::disjoint_cycles(spec.n);
        case GraphKind::CircularSkipLink: return detail::circular_skip_link(spec.n, spec.skip);
        case GraphKind::Shrikhande: return detail::shrikhande();
        case GraphKind::Rook4x4: return detail::rook_4x4();
        case GraphKind::Complete: return detail::complete(spec.n);
    }
    throw ValidationError("kind: unknown generator");
}

}  // namespace siri
