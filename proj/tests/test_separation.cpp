#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "siri/generators.hpp"
#include "siri/separation.hpp"

using namespace siri;

namespace {

ModelConfig embed_model(int rnf) {
    ModelConfig cfg;
    cfg.layers = 2;
    cfg.hidden_dim = 6;
    cfg.rnf_dim = rnf;
    return cfg;
}

}  // namespace

TEST_CASE("constant-feature mean embedding ignores S and seed", "[separation]") {
    ModelConfig cfg = embed_model(0);
    ModelParams params = init_params(cfg, 1);
    Graph g = generate({GraphKind::Cycle, 8});
    Tensor a = mean_embedding(params, cfg, g, 1, 5);
    Tensor b = mean_embedding(params, cfg, g, 7, 99);  // averaging S copies costs one ulp
    for (int j = 0; j < cfg.hidden_dim; ++j) CHECK(a.data[j] == Catch::Approx(b.data[j]).margin(1e-12));
}

TEST_CASE("node-permuted copies give identical embeddings under constant features", "[separation]") {
    ModelConfig cfg = embed_model(0);
    ModelParams params = init_params(cfg, 2);
    GeneratorSpec s{GraphKind::BarabasiAlbert, 10};
    s.m = 2;
    s.seed = 7;
    Graph g = generate(s);
    std::vector<int> perm = {3, 1, 4, 0, 9, 2, 8, 6, 7, 5};
    Tensor a = mean_embedding(params, cfg, g, 1, 5);
    Tensor b = mean_embedding(params, cfg, g.permuted(perm), 1, 5);
    for (int j = 0; j < cfg.hidden_dim; ++j) CHECK(a.data[j] == Catch::Approx(b.data[j]).margin(1e-9));
}

TEST_CASE("judging a pair against itself with constant features is not a separation", "[separation]") {
    ModelConfig cfg = embed_model(0);
    ModelParams params = init_params(cfg, 3);
    Graph g = generate({GraphKind::Shrikhande});
    PairVerdict v = judge_pair(params, cfg, g, g, 4, 1e-6, 11);
    CHECK(v.cosine_distance < 1e-12);
    CHECK_FALSE(v.distinguished);
    CHECK(v.reliable);
}

TEST_CASE("orthogonal embeddings give distance 1", "[separation]") {
    Tensor a(1, 2, {1.0, 0.0});
    Tensor b(1, 2, {0.0, 1.0});
    CHECK(1.0 - cosine_sim_value(a, b) == 1.0);
}

TEST_CASE("judge_pair distance is exactly symmetric with shared seeds", "[separation][property]") {
    ModelConfig cfg = embed_model(4);
    ModelParams params = init_params(cfg, 4);
    auto pair = generate_pair_family("wl1-hard-regular", 1)[0];
    PairVerdict ab = judge_pair(params, cfg, pair.first, pair.second, 4, 0.1, 21);
    PairVerdict ba = judge_pair(params, cfg, pair.second, pair.first, 4, 0.1, 21);
    CHECK(ab.cosine_distance == ba.cosine_distance);
}

TEST_CASE("constant models never separate WL-equivalent equal-size pairs", "[separation][property]") {
    ModelConfig cfg = embed_model(0);
    cfg.layers = 3;
    ModelParams params = init_params(cfg, 5);
    for (const char* family : {"wl1-hard-basic", "wl1-hard-regular"}) {
        for (const GraphPair& p : generate_pair_family(family, 3)) {
            Tensor a = mean_embedding(params, cfg, p.first, 1, 9);
            Tensor b = mean_embedding(params, cfg, p.second, 1, 9);
            for (int j = 0; j < cfg.hidden_dim; ++j) CHECK(a.data[j] == Catch::Approx(b.data[j]).margin(1e-9));
        }
    }
}

TEST_CASE("suite reporting: empty list and all-identical pairs", "[separation]") {
    ModelConfig cfg = embed_model(0);
    ModelParams params = init_params(cfg, 6);

    SuiteReport empty = run_suite(params, cfg, {}, 2, 1e-6, 3);
    CHECK(empty.total() == 0);
    CHECK(empty.separated() == 0);

    Graph g = generate({GraphKind::Cycle, 6});
    std::vector<FamilyPairs> fams(1);
    fams[0].family = "identical";
    for (int i = 0; i < 3; ++i) fams[0].pairs.push_back(GraphPair{g, g, true});
    SuiteReport rep = run_suite(params, cfg, fams, 2, 1e-6, 3);
    CHECK(rep.total() == 3);
    CHECK(rep.separated() == 0);

    std::stringstream ss;
    write_suite_csv(rep, ss);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "family,pair_id,distance,distinguished,reliable");
    std::stringstream sum;
    write_suite_summary_csv(rep, sum);
    std::getline(sum, header);
    CHECK(header == "family,separated,total,percent");
}

TEST_CASE("epsilon calibration covers isomorphic-copy distances with the safety factor", "[separation]") {
    ModelConfig cfg = embed_model(4);
    ModelParams params = init_params(cfg, 7);
    auto pairs = generate_pair_family("wl1-hard-basic", 2);
    const double eps = calibrate_epsilon(params, cfg, pairs, 4, 31);
    CHECK(eps >= 1e-6);
    // at the calibrated epsilon, no isomorphic copy may count as distinguished
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        PairVerdict v = judge_pair(params, cfg, pairs[i].first, pairs[i].first, 4, eps, 100 + i);
        CHECK_FALSE(v.distinguished);
    }
}

TEST_CASE("zero-norm embeddings raise the undefined-cosine error", "[separation]") {
    Tensor z(1, 3);
    CHECK_THROWS_AS(cosine_sim_value(z, z), NumericError);
}
