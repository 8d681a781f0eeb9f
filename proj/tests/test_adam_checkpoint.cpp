#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "siri/adam.hpp"
#include "siri/checkpoint.hpp"
#include "siri/rng.hpp"

using namespace siri;

TEST_CASE("adam leaves parameters unchanged under zero gradients", "[adam]") {
    Tensor p = Tensor::filled(2, 2, 0.5);
    Tensor g(2, 2);
    AdamState adam{AdamConfig{0.1}};
    adam.step({&p}, {&g});
    for (double v : p.data) CHECK(v == 0.5);
}

TEST_CASE("first adam step with unit gradient moves by about lr", "[adam]") {
    Tensor p = Tensor::filled(1, 1, 1.0);
    Tensor g = Tensor::filled(1, 1, 1.0);
    AdamState adam{AdamConfig{0.1}};
    adam.step({&p}, {&g});
    // bias-corrected first step: lr * g / (sqrt(g^2) + eps)
    CHECK(p.data[0] == Catch::Approx(1.0 - 0.1).epsilon(1e-6));
}

TEST_CASE("identical runs produce bitwise-identical parameters", "[adam][property]") {
    auto run = []() {
        Rng rng(64);
        Tensor p(3, 3);
        for (double& v : p.data) v = rng.normal();
        AdamState adam{AdamConfig{0.01}};
        for (int step = 0; step < 50; ++step) {
            Tensor g(3, 3);
            for (double& v : g.data) v = rng.normal();
            adam.step({&p}, {&g});
        }
        return p;
    };
    Tensor a = run();
    Tensor b = run();
    CHECK(a.data == b.data);
}

TEST_CASE("adam validates shape agreement", "[adam]") {
    Tensor p(2, 2), g(2, 3);
    AdamState adam;
    CHECK_THROWS_AS(adam.step({&p}, {&g}), DimensionError);
}

TEST_CASE("checkpoints round-trip bitwise", "[checkpoint][property]") {
    Rng rng(17);
    NamedTensors named;
    named.emplace_back("w", Tensor(3, 4));
    named.emplace_back("b", Tensor(1, 4));
    for (auto& [name, t] : named)
        for (double& v : t.data) v = rng.normal() * 1e3;

    std::stringstream ss;
    write_checkpoint(named, ss);
    NamedTensors back = read_checkpoint(ss);
    REQUIRE(back.size() == named.size());
    for (std::size_t i = 0; i < named.size(); ++i) {
        CHECK(back[i].first == named[i].first);
        CHECK(back[i].second.data == named[i].second.data);  // 17 digits round-trip exactly
    }
}

TEST_CASE("checkpoint reader reports malformed content with line numbers", "[checkpoint]") {
    std::stringstream ss("params 1\nw 2 2\n1.0 2.0\n3.0\n");
    try {
        read_checkpoint(ss);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 4);
    }
}
