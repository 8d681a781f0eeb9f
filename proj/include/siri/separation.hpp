#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "siri/errors.hpp"
#include "siri/graph.hpp"
#include "siri/model.hpp"
#include "siri/pair_families.hpp"
#include "siri/rng.hpp"
#include "siri/train.hpp"

namespace siri {

// Graph-level embedding: sum-pooled final-layer node embeddings, averaged
// over S independent RNF draws. With r=0 the draws are empty and the result
// is deterministic.
inline Tensor mean_embedding(const ModelParams& params, const ModelConfig& cfg, const Graph& g, int S,
                             std::uint64_t seed) {
    if (S < 1) throw ValidationError("S: must be >= 1");
    RnfSpec spec{cfg.rnf_dim, cfg.distribution, derive_seed(seed, "separation-rnf")};
    Tensor acc(1, cfg.hidden_dim);
    for (int s = 0; s < S; ++s) {
        std::optional<Tensor> r;
        if (cfg.rnf_dim > 0) r = spec.sample(g.num_nodes(), static_cast<std::uint64_t>(s));
        Tensor h = gnn_trunk_eval_batched(params, g, augment_features(g, r, cfg), 1);
        for (int i = 0; i < h.rows; ++i) {
            const double* row = h.row(i);
            for (int j = 0; j < h.cols; ++j) acc.data[j] += row[j];
        }
    }
    for (double& v : acc.data) v /= static_cast<double>(S);
    return acc;
}

struct PairVerdict {
    double cosine_distance = 0.0;  // 1 - cosine similarity, in [0, 2]
    bool distinguished = false;
    bool reliable = false;
    double epsilon = 0.0;
    int sample_count = 0;
};

// Self-distance of a graph against a random node-permuted copy under fresh
// draws; the reliability probe.
inline double isomorphic_copy_distance(const ModelParams& params, const ModelConfig& cfg, const Graph& g, int S,
                                       std::uint64_t seed) {
    Rng perm_rng(derive_seed(seed, "separation-perm"));
    std::vector<int> perm(g.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i) perm[i] = i;
    for (int i = g.num_nodes() - 1; i > 0; --i)
        std::swap(perm[i], perm[static_cast<int>(perm_rng.below(static_cast<std::uint64_t>(i + 1)))]);
    Graph copy = g.permuted(perm);
    // Fresh draws for each side (not shared), so the probe exercises genuine
    // RNF variation on top of the relabeling.
    Tensor e1 = mean_embedding(params, cfg, g, S, derive_seed(seed, "separation-self-a"));
    Tensor e2 = mean_embedding(params, cfg, copy, S, derive_seed(seed, "separation-self-b"));
    return 1.0 - cosine_sim_value(e1, e2);
}

// distinguished iff the mean-embedding cosine distance exceeds epsilon;
// reliable iff a random isomorphic copy of g1 stays within epsilon.
inline PairVerdict judge_pair(const ModelParams& params, const ModelConfig& cfg, const Graph& g1, const Graph& g2,
                              int S, double epsilon, std::uint64_t seed) {
    if (S < 1) throw ValidationError("S: must be >= 1");
    if (epsilon <= 0.0) throw ValidationError("epsilon: must be > 0");
    PairVerdict v;
    v.epsilon = epsilon;
    v.sample_count = S;
    // Both sides share one draw stream (common random numbers), which makes
    // the distance exactly symmetric in (g1, g2) for equal node counts.
    const std::uint64_t embed_seed = derive_seed(seed, "separation-embed");
    Tensor e1 = mean_embedding(params, cfg, g1, S, embed_seed);
    Tensor e2 = mean_embedding(params, cfg, g2, S, embed_seed);
    v.cosine_distance = 1.0 - cosine_sim_value(e1, e2);
    v.distinguished = v.cosine_distance > epsilon;
    v.reliable = isomorphic_copy_distance(params, cfg, g1, S, derive_seed(seed, "separation-reliability")) <= epsilon;
    return v;
}

// Calibration: smallest epsilon covering every isomorphic-copy distance,
// times a safety factor of 2, floored to keep float dust out of verdicts.
inline double calibrate_epsilon(const ModelParams& params, const ModelConfig& cfg, const std::vector<GraphPair>& pairs,
                                int S, std::uint64_t seed, double floor_value = 1e-6) {
    double max_self = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        max_self = std::max(max_self, isomorphic_copy_distance(params, cfg, pairs[i].first, S,
                                                               derive_seed(seed, "calibration", 2 * i)));
        max_self = std::max(max_self, isomorphic_copy_distance(params, cfg, pairs[i].second, S,
                                                               derive_seed(seed, "calibration", 2 * i + 1)));
    }
    return std::max(2.0 * max_self, floor_value);
}

struct SuiteRow {
    std::string family;
    int pair_id = 0;
    PairVerdict verdict;
};

struct SuiteReport {
    std::vector<SuiteRow> rows;
    double epsilon = 0.0;

    int separated(const std::string& family = "") const {
        int c = 0;
        for (const auto& r : rows)
            if ((family.empty() || r.family == family) && r.verdict.distinguished && r.verdict.reliable) ++c;
        return c;
    }
    int total(const std::string& family = "") const {
        int c = 0;
        for (const auto& r : rows)
            if (family.empty() || r.family == family) ++c;
        return c;
    }
};

struct FamilyPairs {
    std::string family;
    std::vector<GraphPair> pairs;
};

inline SuiteReport run_suite(const ModelParams& params, const ModelConfig& cfg, const std::vector<FamilyPairs>& families,
                             int S, double epsilon, std::uint64_t seed) {
    SuiteReport report;
    report.epsilon = epsilon;
    for (const auto& fam : families) {
        for (std::size_t i = 0; i < fam.pairs.size(); ++i) {
            SuiteRow row;
            row.family = fam.family;
            row.pair_id = static_cast<int>(i);
            row.verdict = judge_pair(params, cfg, fam.pairs[i].first, fam.pairs[i].second, S, epsilon,
                                     derive_seed(seed, "suite-" + fam.family, i));
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

// CSV: family,pair_id,distance,distinguished,reliable
inline void write_suite_csv(const SuiteReport& r, std::ostream& os) {
    os.precision(17);
    os << "family,pair_id,distance,distinguished,reliable\n";
    for (const auto& row : r.rows)
        os << row.family << ',' << row.pair_id << ',' << row.verdict.cosine_distance << ','
           << (row.verdict.distinguished ? 1 : 0) << ',' << (row.verdict.reliable ? 1 : 0) << '\n';
}

// Summary CSV: family,separated,total,percent
inline void write_suite_summary_csv(const SuiteReport& r, std::ostream& os) {
    os.precision(17);
    os << "family,separated,total,percent\n";
    std::vector<std::string> seen;
    for (const auto& row : r.rows)
        if (std::find(seen.begin(), seen.end(), row.family) == seen.end()) seen.push_back(row.family);
    for (const auto& fam : seen) {
        const int sep = r.separated(fam);
        const int tot = r.total(fam);
        os << fam << ',' << sep << ',' << tot << ',' << (tot ? 100.0 * sep / tot : 0.0) << '\n';
    }
    os << "all," << r.separated() << ',' << r.total() << ','
       << (r.total() ? 100.0 * r.separated() / r.total() : 0.0) << '\n';
}

}  // namespace siri
