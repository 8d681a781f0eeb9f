#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "siri/graph.hpp"

namespace siri {

// Stable 1-WL color refinement result. Colors are dense integers, canonical
// per round by signature sorting, so equal partitions always get equal ids.
struct WlColoring {
    std::vector<int> colors;
    int rounds_to_stability = 0;
    std::vector<std::pair<int, int>> histogram;  // (color, count), sorted by color

    int num_colors() const { return static_cast<int>(histogram.size()); }
};

namespace detail {

// Dense re-indexing by sorted signature rank; permutation-equivariant and
// collision-free by construction.
template <typename Signature>
inline std::vector<int> canonical_colors(const std::vector<Signature>& sigs) {
    std::vector<Signature> sorted = sigs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> colors(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i)
        colors[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sigs[i]) - sorted.begin());
    return colors;
}

inline std::vector<int> initial_colors(const Graph& g) {
    const int n = g.num_nodes();
    if (!g.has_features()) return std::vector<int>(n, 0);
    const Tensor& x = g.features();
    std::vector<std::vector<double>> sigs(n);
    for (int i = 0; i < n; ++i) sigs[i].assign(x.row(i), x.row(i) + x.cols);
    return canonical_colors(sigs);
}

inline int count_colors(const std::vector<int>& colors) {
    return colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
}

inline std::vector<int> refine_round(const Graph& g, const std::vector<int>& colors) {
    const int n = g.num_nodes();
    std::vector<std::vector<int>> sigs(n);
    for (int v = 0; v < n; ++v) {
        std::vector<int> neigh;
        neigh.reserve(g.neighbors(v).size());
        for (int u : g.neighbors(v)) neigh.push_back(colors[u]);
        std::sort(neigh.begin(), neigh.end());
        sigs[v].push_back(colors[v]);
        sigs[v].insert(sigs[v].end(), neigh.begin(), neigh.end());
    }
    return canonical_colors(sigs);
}

}  // namespace detail

// Standard 1-WL color refinement from uniform colors (feature-derived colors
// when features are present), iterated until the partition stops refining.
inline WlColoring wl_refine(const Graph& g) {
    WlColoring out;
    std::vector<int> colors = detail::initial_colors(g);
    int rounds = 0;
    while (true) {
        std::vector<int> next = detail::refine_round(g, colors);
        if (detail::count_colors(next) == detail::count_colors(colors)) break;  // refinement only splits
        colors = std::move(next);
        ++rounds;
    }
    out.colors = std::move(colors);
    out.rounds_to_stability = rounds;
    std::map<int, int> hist;
    for (int c : out.colors) ++hist[c];
    out.histogram.assign(hist.begin(), hist.end());
    return out;
}

// 1-WL equivalence decided on the disjoint union, so the two graphs share one
// color namespace. Necessary condition for isomorphism.
inline bool wl_equivalent(const Graph& g1, const Graph& g2) {
    if (g1.num_nodes() != g2.num_nodes() || g1.num_edges() != g2.num_edges()) return false;
    const int n1 = g1.num_nodes();
    Graph joint(n1 + g2.num_nodes());
    for (auto [u, v] : g1.edges()) joint.add_edge(u, v);
    for (auto [u, v] : g2.edges()) joint.add_edge(n1 + u, n1 + v);
    WlColoring c = wl_refine(joint);
    std::map<int, int> h1, h2;
    for (int v = 0; v < n1; ++v) ++h1[c.colors[v]];
    for (int v = n1; v < joint.num_nodes(); ++v) ++h2[c.colors[v]];
    return h1 == h2;
}

}  // namespace siri
