#include <catch2/catch_amalgamated.hpp>

#include "siri/generators.hpp"
#include "siri/rng.hpp"

using namespace siri;

TEST_CASE("BA graph has the forced edge count", "[generators]") {
    GeneratorSpec spec{GraphKind::BarabasiAlbert, 100};
    spec.m = 2;
    spec.seed = 42;
    Graph g = generate(spec);
    CHECK(g.num_nodes() == 100);
    CHECK(g.num_edges() == 3 + 97 * 2);
}

TEST_CASE("BA generation is deterministic in the seed and validates parameters", "[generators]") {
    GeneratorSpec spec{GraphKind::BarabasiAlbert, 30};
    spec.m = 3;
    spec.seed = 7;
    CHECK(generate(spec) == generate(spec));
    spec.seed = 8;
    GeneratorSpec bad = spec;
    bad.m = 30;
    CHECK_THROWS_AS(generate(bad), ValidationError);
    bad.m = 0;
    CHECK_THROWS_AS(generate(bad), ValidationError);
}

TEST_CASE("graph invariants hold for generated BA graphs over many seeds", "[generators][property]") {
    Rng rng(2024);
    for (int i = 0; i < 25; ++i) {
        GeneratorSpec spec{GraphKind::BarabasiAlbert, 5 + static_cast<int>(rng.below(60))};
        spec.m = 1 + static_cast<int>(rng.below(4));
        if (spec.m >= spec.n) spec.m = spec.n - 1;
        spec.seed = rng.next_u64();
        Graph g = generate(spec);
        // each new node contributes exactly m distinct edges
        CHECK(g.num_edges() == spec.m * (spec.m + 1) / 2 + (spec.n - spec.m - 1) * spec.m);
        std::set<std::pair<int, int>> seen;
        for (auto [u, v] : g.edges()) {
            CHECK(u < v);
            CHECK(v < spec.n);
            CHECK(u >= 0);
            CHECK(seen.insert({u, v}).second);
        }
    }
}

TEST_CASE("cycle generator produces 2-regular graphs", "[generators]") {
    Graph c6 = generate({GraphKind::Cycle, 6});
    CHECK(c6.num_edges() == 6);
    for (int v = 0; v < 6; ++v) CHECK(c6.degree(v) == 2);
}

TEST_CASE("shrikhande is SRG(16,6,2,2) by exhaustive pair counting", "[generators]") {
    Graph g = generate({GraphKind::Shrikhande});
    REQUIRE(g.num_nodes() == 16);
    CHECK(g.num_edges() == 48);
    for (int v = 0; v < 16; ++v) CHECK(g.degree(v) == 6);
    for (int u = 0; u < 16; ++u)
        for (int v = u + 1; v < 16; ++v) {
            int common = 0;
            for (int w = 0; w < 16; ++w)
                if (w != u && w != v && g.has_edge(u, w) && g.has_edge(v, w)) ++common;
            CHECK(common == 2);  // lambda = mu = 2
        }
}

TEST_CASE("rook 4x4 is the other SRG(16,6,2,2)", "[generators]") {
    Graph g = generate({GraphKind::Rook4x4});
    REQUIRE(g.num_nodes() == 16);
    CHECK(g.num_edges() == 48);
    for (int v = 0; v < 16; ++v) CHECK(g.degree(v) == 6);
    for (int u = 0; u < 16; ++u)
        for (int v = u + 1; v < 16; ++v) {
            int common = 0;
            for (int w = 0; w < 16; ++w)
                if (w != u && w != v && g.has_edge(u, w) && g.has_edge(v, w)) ++common;
            CHECK(common == 2);
        }
}

TEST_CASE("csl generator enforces skip constraints and regularity", "[generators]") {
    GeneratorSpec spec{GraphKind::CircularSkipLink, 11};
    spec.skip = 3;
    Graph g = generate(spec);
    for (int v = 0; v < 11; ++v) CHECK(g.degree(v) == 4);
    GeneratorSpec bad = spec;
    bad.skip = 1;
    CHECK_THROWS_AS(generate(bad), ValidationError);
    bad.n = 12;
    bad.skip = 3;  // gcd(12,3) != 1
    CHECK_THROWS_AS(generate(bad), ValidationError);
}
