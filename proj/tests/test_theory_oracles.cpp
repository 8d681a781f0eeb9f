#include <catch2/catch_amalgamated.hpp>

#include "siri/generators.hpp"
#include "siri/rng.hpp"
#include "siri/theory_oracles.hpp"

using namespace siri;

TEST_CASE("triangle network: K3 all true, C6 all false, any UIDs", "[oracles]") {
    Rng rng(3);
    Graph k3 = generate({GraphKind::Complete, 3});
    Graph c6 = generate({GraphKind::Cycle, 6});
    for (int trial = 0; trial < 5; ++trial) {
        NodeLabeling tk = triangle_net_forward(k3, random_uids(3, rng));
        CHECK(tk.labels == std::vector<bool>{true, true, true});
        NodeLabeling tc = triangle_net_forward(c6, random_uids(6, rng));
        CHECK(tc.count_true() == 0);
    }
}

TEST_CASE("triangle network equals the exhaustive oracle and ignores UID values", "[oracles][property]") {
    Rng rng(11);
    for (int i = 0; i < 25; ++i) {
        GeneratorSpec s{GraphKind::BarabasiAlbert, 8 + static_cast<int>(rng.below(40))};
        s.m = 1 + static_cast<int>(rng.below(3));
        s.seed = rng.next_u64();
        Graph g = generate(s);
        NodeLabeling truth = label_triangles(g);
        NodeLabeling first = triangle_net_forward(g, random_uids(g.num_nodes(), rng));
        CHECK(first == truth);
        for (int d = 0; d < 4; ++d)
            CHECK(triangle_net_forward(g, random_uids(g.num_nodes(), rng)) == first);
    }
}

TEST_CASE("duplicate UIDs are rejected", "[oracles]") {
    Graph g = generate({GraphKind::Cycle, 3});
    UidAssignment dup;
    dup.values = {0.5, 0.5, 0.7};
    CHECK_THROWS_AS(triangle_net_forward(g, dup), ValidationError);
    CHECK_THROWS_AS(matching_oracle_relabel(g, dup), ValidationError);
}

TEST_CASE("layer-2 states vary across UID draws", "[oracles]") {
    Rng rng(13);
    GeneratorSpec s{GraphKind::BarabasiAlbert, 12};
    s.m = 2;
    s.seed = 4;
    Graph g = generate(s);
    TriangleNetStates a = triangle_net_states(g, random_uids(12, rng));
    TriangleNetStates b = triangle_net_states(g, random_uids(12, rng));
    bool any_differ = false;
    for (int v = 0; v < 12; ++v)
        if (a.flatten_layer2(v) != b.flatten_layer2(v)) any_differ = true;
    CHECK(any_differ);
}

TEST_CASE("relabeling assigns 1..n in visit order", "[oracles]") {
    Graph g(3);
    UidAssignment uids;
    uids.values = {0.7, 0.2, 0.9};
    CHECK(matching_oracle_relabel(g, uids) == std::vector<int>{1, 2, 3});
    // repeated visits hit the cache
    CHECK(matching_oracle_relabel(g, uids, {2, 0, 2, 1, 0}) == std::vector<int>{2, 3, 1});
}

TEST_CASE("relabeling is invariant under bijective UID re-randomization", "[oracles][property]") {
    Rng rng(17);
    for (int i = 0; i < 10; ++i) {
        GeneratorSpec s{GraphKind::BarabasiAlbert, 6 + static_cast<int>(rng.below(20))};
        s.m = 2;
        s.seed = rng.next_u64();
        Graph g = generate(s);
        std::vector<int> reference = matching_oracle_relabel(g, random_uids(g.num_nodes(), rng));
        for (int d = 0; d < 20; ++d)
            CHECK(matching_oracle_relabel(g, random_uids(g.num_nodes(), rng)) == reference);
    }
}

TEST_CASE("downstream functions composed with relabeling are UID-invariant", "[oracles][property]") {
    Rng rng(19);
    GeneratorSpec s{GraphKind::BarabasiAlbert, 15};
    s.m = 2;
    s.seed = 21;
    Graph g = generate(s);
    auto f = [&](const std::vector<int>& canon) {
        long acc = 0;
        for (auto [u, v] : g.edges()) acc += static_cast<long>(canon[u] + 3) * (canon[v] + 1);
        return acc;
    };
    const long reference = f(matching_oracle_relabel(g, random_uids(15, rng)));
    for (int d = 0; d < 100; ++d) CHECK(f(matching_oracle_relabel(g, random_uids(15, rng))) == reference);
}
