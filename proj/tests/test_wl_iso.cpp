#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "siri/generators.hpp"
#include "siri/isomorphism.hpp"
#include "siri/rng.hpp"
#include "siri/wl.hpp"

using namespace siri;

namespace {

std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(p[i], p[static_cast<int>(rng.below(i + 1))]);
    return p;
}

// Exhaustive isomorphism oracle for tiny graphs.
bool brute_force_isomorphic(const Graph& a, const Graph& b) {
    if (a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges()) return false;
    std::vector<int> perm(a.num_nodes());
    for (int i = 0; i < a.num_nodes(); ++i) perm[i] = i;
    do {
        bool ok = true;
        for (auto [u, v] : a.edges())
            if (!b.has_edge(perm[u], perm[v])) {
                ok = false;
                break;
            }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

Graph random_graph(int n, double p, Rng& rng) {
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.uniform01() < p) g.add_edge(u, v);
    return g;
}

}  // namespace

TEST_CASE("wl assigns one color to regular graphs and the same histogram to 1-WL twins", "[wl]") {
    WlColoring c6 = wl_refine(generate({GraphKind::Cycle, 6}));
    WlColoring cc = wl_refine(generate({GraphKind::DisjointCycles, 6}));
    CHECK(c6.histogram == cc.histogram);
    CHECK(c6.num_colors() == 1);

    WlColoring s = wl_refine(generate({GraphKind::Shrikhande}));
    WlColoring r = wl_refine(generate({GraphKind::Rook4x4}));
    CHECK(s.histogram == r.histogram);
    CHECK(s.num_colors() == 1);
}

TEST_CASE("wl separates path endpoints from the center", "[wl]") {
    Graph p3 = Graph::from_edges(3, {{0, 1}, {1, 2}});
    WlColoring c = wl_refine(p3);
    CHECK(c.num_colors() == 2);
    CHECK(c.colors[0] == c.colors[2]);
    CHECK(c.colors[0] != c.colors[1]);
}

TEST_CASE("wl coloring is a fixpoint and permutation-equivariant", "[wl][property]") {
    Rng rng(7);
    for (int i = 0; i < 15; ++i) {
        Graph g = random_graph(4 + static_cast<int>(rng.below(10)), 0.35, rng);
        WlColoring c = wl_refine(g);
        // one more round leaves the partition unchanged
        std::vector<int> again = detail::refine_round(g, c.colors);
        CHECK(detail::count_colors(again) == c.num_colors());

        std::vector<int> perm = random_permutation(g.num_nodes(), rng);
        WlColoring cp = wl_refine(g.permuted(perm));
        CHECK(cp.histogram == c.histogram);
        for (int v = 0; v < g.num_nodes(); ++v) CHECK(cp.colors[perm[v]] == c.colors[v]);
    }
}

TEST_CASE("isomorphism: known pairs", "[iso]") {
    CHECK_FALSE(are_isomorphic(generate({GraphKind::Cycle, 6}), generate({GraphKind::DisjointCycles, 6})));
    CHECK_FALSE(are_isomorphic(generate({GraphKind::Shrikhande}), generate({GraphKind::Rook4x4})));
    Graph g = generate({GraphKind::Shrikhande});
    CHECK(are_isomorphic(g, g));
}

TEST_CASE("isomorphism agrees with brute force on small random graphs", "[iso][property]") {
    Rng rng(1234);
    for (int i = 0; i < 30; ++i) {
        const int n = 4 + static_cast<int>(rng.below(4));  // up to 7 nodes
        Graph a = random_graph(n, 0.4, rng);
        Graph b = random_graph(n, 0.4, rng);
        CHECK(are_isomorphic(a, b) == brute_force_isomorphic(a, b));
        CHECK(are_isomorphic(b, a) == are_isomorphic(a, b));  // symmetry
    }
}

TEST_CASE("permuted copies are always isomorphic; different WL histograms never are", "[iso][property]") {
    Rng rng(77);
    for (int i = 0; i < 20; ++i) {
        Graph g = random_graph(6 + static_cast<int>(rng.below(20)), 0.3, rng);
        CHECK(are_isomorphic(g, g.permuted(random_permutation(g.num_nodes(), rng))));
    }
    // histogram inequality implies non-isomorphism
    for (int i = 0; i < 10; ++i) {
        Graph a = random_graph(8, 0.3, rng);
        Graph b = random_graph(8, 0.3, rng);
        if (wl_refine(a).histogram != wl_refine(b).histogram) CHECK_FALSE(are_isomorphic(a, b));
    }
}

TEST_CASE("isomorphism rejects oversized inputs", "[iso]") {
    Graph big(65);
    CHECK_THROWS_AS(are_isomorphic(big, big), CapacityError);
}
