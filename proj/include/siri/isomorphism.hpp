#pragma once

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "siri/errors.hpp"
#include "siri/graph.hpp"
#include "siri/wl.hpp"

namespace siri {

namespace detail {

struct IsoProblem {
    int n;
    std::vector<std::uint64_t> adj1, adj2;  // bitmask adjacency rows
    std::vector<int> color1, color2;        // stable WL colors on the union
    std::vector<int> order;                 // g1 node visit order
};

inline bool extend_mapping(const IsoProblem& p, std::vector<int>& map12, std::vector<bool>& used2, int depth) {
    if (depth == p.n) return true;
    const int u = p.order[depth];
    const std::uint64_t u_adj = p.adj1[u];
    for (int v = 0; v < p.n; ++v) {
        if (used2[v]) continue;
        if (p.color1[u] != p.color2[v]) continue;
        // consistency with all previously mapped nodes, both directions
        bool ok = true;
        for (int d = 0; d < depth && ok; ++d) {
            const int w = p.order[d];
            const bool e1 = (u_adj >> w) & 1;
            const bool e2 = (p.adj2[v] >> map12[w]) & 1;
            ok = (e1 == e2);
        }
        if (!ok) continue;
        map12[u] = v;
        used2[v] = true;
        if (extend_mapping(p, map12, used2, depth + 1)) return true;
        used2[v] = false;
    }
    return false;
}

}  // namespace detail

// Exact isomorphism test by backtracking with degree/WL-color pruning.
// Exhaustive: returns true iff an edge-preserving bijection exists.
inline bool are_isomorphic(const Graph& g1, const Graph& g2) {
    if (g1.num_nodes() > 64 || g2.num_nodes() > 64)
        throw CapacityError("are_isomorphic: supports n <= 64");
    if (g1.num_nodes() != g2.num_nodes() || g1.num_edges() != g2.num_edges()) return false;
    const int n = g1.num_nodes();

    // Stable colors computed jointly so they are comparable across the graphs;
    // mismatched histograms already settle the answer.
    Graph joint(2 * n);
    for (auto [u, v] : g1.edges()) joint.add_edge(u, v);
    for (auto [u, v] : g2.edges()) joint.add_edge(n + u, n + v);
    WlColoring joint_colors = wl_refine(joint);

    detail::IsoProblem p;
    p.n = n;
    p.color1.assign(joint_colors.colors.begin(), joint_colors.colors.begin() + n);
    p.color2.assign(joint_colors.colors.begin() + n, joint_colors.colors.end());
    {
        std::vector<int> h1 = p.color1, h2 = p.color2;
        std::sort(h1.begin(), h1.end());
        std::sort(h2.begin(), h2.end());
        if (h1 != h2) return false;
    }

    p.adj1.assign(n, 0);
    p.adj2.assign(n, 0);
    for (auto [u, v] : g1.edges()) {
        p.adj1[u] |= std::uint64_t{1} << v;
        p.adj1[v] |= std::uint64_t{1} << u;
    }
    for (auto [u, v] : g2.edges()) {
        p.adj2[u] |= std::uint64_t{1} << v;
        p.adj2[v] |= std::uint64_t{1} << u;
    }

    // Visit order: BFS-ish greedy that keeps each next node adjacent to the
    // mapped prefix when possible, preferring rare colors and high degree.
    std::vector<int> color_count(joint_colors.num_colors(), 0);
    for (int c : p.color1) ++color_count[c];
    std::vector<bool> placed(n, false);
    for (int step = 0; step < n; ++step) {
        int best = -1;
        int best_attached = -1, best_rarity = 0, best_degree = -1;
        for (int u = 0; u < n; ++u) {
            if (placed[u]) continue;
            int attached = 0;
            for (int w : p.order)
                if ((p.adj1[u] >> w) & 1) ++attached;
            const int rarity = -color_count[p.color1[u]];
            const int deg = g1.degree(u);
            if (best == -1 || std::tie(attached, rarity, deg) > std::tie(best_attached, best_rarity, best_degree)) {
                best = u;
                best_attached = attached;
                best_rarity = rarity;
                best_degree = deg;
            }
        }
        p.order.push_back(best);
        placed[best] = true;
    }

    std::vector<int> map12(n, -1);
    std::vector<bool> used2(n, false);
    return detail::extend_mapping(p, map12, used2, 0);
}

}  // namespace siri
