#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "siri/generators.hpp"
#include "siri/graph.hpp"
#include "siri/invariance.hpp"
#include "siri/manifest.hpp"
#include "siri/model.hpp"
#include "siri/pair_families.hpp"
#include "siri/separation.hpp"
#include "siri/train.hpp"

namespace siri {

// ---------------------------------------------------------------------------
// Node-level triangle detection on preferential-attachment graphs: train on
// BA(n, m_train), test on fresh BA(n, m_train) draws (interpolation) and
// BA(n, 3) draws (extrapolation).

struct TriangleData {
    std::vector<Graph> train_graphs, interp_graphs, extrap_graphs;
    Dataset train, interp, extrap;
};

inline Dataset label_graphs(const std::vector<Graph>& graphs) {
    Dataset out;
    for (const Graph& g : graphs) {
        Example e;
        e.g = g;
        NodeLabeling lab = label_triangles(g);
        e.node_labels.assign(lab.labels.begin(), lab.labels.end());
        out.push_back(std::move(e));
    }
    return out;
}

inline TriangleData make_triangle_data(const ExperimentManifest& m, int m_extrap = 3) {
    TriangleData d;
    auto gen_set = [&](int count, int attach, const char* tag) {
        std::vector<Graph> out;
        for (int i = 0; i < count; ++i) {
            GeneratorSpec spec{GraphKind::BarabasiAlbert, m.n};
            spec.m = attach;
            spec.seed = m.seed_for(std::string("data-") + tag, static_cast<std::uint64_t>(i));
            out.push_back(generate(spec));
        }
        return out;
    };
    d.train_graphs = gen_set(m.train_graphs, m.m_train, "train");
    d.interp_graphs = gen_set(m.test_graphs, m.m_train, "interp");
    d.extrap_graphs = gen_set(m.test_graphs, m_extrap, "extrap");
    d.train = label_graphs(d.train_graphs);
    d.interp = label_graphs(d.interp_graphs);
    d.extrap = label_graphs(d.extrap_graphs);
    return d;
}

struct ModeRun {
    std::string mode;
    int k = 1;
    int seed_index = 0;
    TrainHistory history;
    ModelParams params;
    ModelConfig model;
    TrainConfig config;
    double interp_acc = 0.0;
    double extrap_acc = 0.0;
};

// Constant mode drops the RNF columns entirely (pure constant-1 features).
inline ModelConfig model_for_mode(ModelConfig base, TrainMode mode) {
    if (mode == TrainMode::Constant) base.rnf_dim = 0;
    return base;
}

inline ModeRun run_triangle_mode(const TriangleData& data, const ExperimentManifest& m, TrainMode mode, int k,
                                 int seed_index, bool history_on_extrap = false) {
    ModeRun run;
    run.mode = to_string(mode);
    run.k = k;
    run.seed_index = seed_index;
    run.model = model_for_mode(m.model, mode);
    run.model.readout = Readout::Node;
    run.model.out_dim = 2;
    run.config.mode = mode;
    run.config.k = k;
    run.config.epochs = m.train.epochs;
    run.config.lr = m.train.lr;
    run.config.task = TaskKind::NodeBinary;
    run.config.contrastive_weight = m.train.contrastive_weight;
    run.config.seed = m.seed_for("train-" + run.mode + "-k" + std::to_string(k), static_cast<std::uint64_t>(seed_index));

    TrainResult res = train(data.train, history_on_extrap ? data.extrap : data.interp, run.model, run.config);
    run.history = std::move(res.history);
    run.params = std::move(res.params);
    const std::uint64_t eval_seed = m.seed_for("final-eval", static_cast<std::uint64_t>(seed_index));
    run.interp_acc = evaluate_accuracy(run.params, run.model, run.config, data.interp, eval_seed);
    run.extrap_acc = evaluate_accuracy(run.params, run.model, run.config, data.extrap, eval_seed + 1);
    return run;
}

struct ModeSummary {
    std::string mode;
    int k = 1;
    double interp_mean = 0.0, interp_std = 0.0;
    double extrap_mean = 0.0, extrap_std = 0.0;
};

inline ModeSummary summarize_mode(const std::vector<ModeRun>& runs, const std::string& mode, int k) {
    ModeSummary s;
    s.mode = mode;
    s.k = k;
    std::vector<double> interp, extrap;
    for (const ModeRun& r : runs)
        if (r.mode == mode && r.k == k) {
            interp.push_back(r.interp_acc);
            extrap.push_back(r.extrap_acc);
        }
    auto stats = [](const std::vector<double>& xs, double& mean, double& sd) {
        if (xs.empty()) return;
        mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        sd = 0.0;
        for (double x : xs) sd += (x - mean) * (x - mean);
        sd = std::sqrt(sd / static_cast<double>(xs.size()));
    };
    stats(interp, s.interp_mean, s.interp_std);
    stats(extrap, s.extrap_mean, s.extrap_std);
    return s;
}

// summary CSV: mode,k,seed,interp_acc,extrap_acc plus mean/std rows
inline void write_triangle_summary_csv(const std::vector<ModeRun>& runs, std::ostream& os) {
    os.precision(17);
    os << "mode,k,seed,interp_acc,extrap_acc\n";
    for (const ModeRun& r : runs)
        os << r.mode << ',' << r.k << ',' << r.seed_index << ',' << r.interp_acc << ',' << r.extrap_acc << '\n';
    std::vector<std::pair<std::string, int>> seen;
    for (const ModeRun& r : runs) {
        auto key = std::make_pair(r.mode, r.k);
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
    }
    for (const auto& [mode, k] : seen) {
        ModeSummary s = summarize_mode(runs, mode, k);
        os << mode << ',' << k << ",mean," << s.interp_mean << ',' << s.extrap_mean << '\n';
        os << mode << ',' << k << ",std," << s.interp_std << ',' << s.extrap_std << '\n';
    }
}

// Invariance report for a trained triangle run, over capped train/test
// subsets (the protocol's sets are a few hundred nodes each).
inline InvarianceReport triangle_invariance_report(const ModeRun& run, const TriangleData& data,
                                                   const ExperimentManifest& m) {
    GnnPredictor pred(run.params, run.model);
    RnfSpec spec{run.model.rnf_dim, run.model.distribution, m.seed_for("invariance-rnf")};
    std::vector<Graph> train_subset(
        data.train_graphs.begin(),
        data.train_graphs.begin() + std::min<std::size_t>(data.train_graphs.size(), m.invariance_graphs));
    std::vector<Graph> test_subset(
        data.interp_graphs.begin(),
        data.interp_graphs.begin() + std::min<std::size_t>(data.interp_graphs.size(), m.invariance_graphs));
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < m.invariance_seeds; ++i)
        seeds.push_back(m.seed_for("invariance-seed", static_cast<std::uint64_t>(i)));
    return set_invariance_report(pred, train_subset, test_subset, spec, m.invariance_T, seeds);
}

// ---------------------------------------------------------------------------
// Graph-level classification surrogate for the convergence comparison:
// 1-WL-equivalent pairs (C_{2k} vs C_k + C_k), class = which member of the
// pair, learnable only through the UIDs.

struct PairClassificationData {
    Dataset train, test;
};

inline PairClassificationData make_pair_classification_data(const ExperimentManifest& m) {
    PairClassificationData d;
    std::vector<GraphPair> pairs =
        generate_pair_family(m.pair_family, m.train_pairs + m.test_pairs, m.seed_for("data-pairs"));
    auto to_examples = [](const GraphPair& p) {
        Example a, b;
        a.g = p.first;
        a.graph_label = 0;
        b.g = p.second;
        b.graph_label = 1;
        return std::make_pair(a, b);
    };
    for (int i = 0; i < m.train_pairs; ++i) {
        auto [a, b] = to_examples(pairs[i]);
        d.train.push_back(a);
        d.train.push_back(b);
    }
    for (int i = m.train_pairs; i < m.train_pairs + m.test_pairs; ++i) {
        auto [a, b] = to_examples(pairs[i]);
        d.test.push_back(a);
        d.test.push_back(b);
    }
    return d;
}

inline ModeRun run_pair_classification_mode(const PairClassificationData& data, const ExperimentManifest& m,
                                            TrainMode mode, int seed_index) {
    ModeRun run;
    run.mode = to_string(mode);
    run.seed_index = seed_index;
    run.model = model_for_mode(m.model, mode);
    run.model.readout = Readout::GraphSumMlp;
    run.model.out_dim = 2;
    run.config.mode = mode;
    run.config.k = m.train.k;
    run.config.epochs = m.train.epochs;
    run.config.lr = m.train.lr;
    run.config.task = TaskKind::GraphBinary;
    run.config.contrastive_weight = m.train.contrastive_weight;
    run.config.seed = m.seed_for("train-" + run.mode, static_cast<std::uint64_t>(seed_index));

    TrainResult res = train(data.train, data.test, run.model, run.config);
    run.history = std::move(res.history);
    run.params = std::move(res.params);
    run.interp_acc = run.history.records.back().test_acc;
    return run;
}

// First epoch whose test accuracy reaches `ratio` of the final test accuracy.
inline int convergence_epoch(const TrainHistory& h, double ratio = 0.95) {
    if (h.records.empty()) return 0;
    const double target = ratio * h.records.back().test_acc;
    for (const EpochRecord& r : h.records)
        if (r.test_acc >= target) return r.epoch;
    return h.records.back().epoch;
}

// convergence CSV: mode,seed,convergence_epoch,final_test_acc
inline void write_convergence_csv(const std::vector<ModeRun>& runs, std::ostream& os) {
    os.precision(17);
    os << "mode,seed,convergence_epoch,final_test_acc\n";
    for (const ModeRun& r : runs)
        os << r.mode << ',' << r.seed_index << ',' << convergence_epoch(r.history) << ','
           << r.history.records.back().test_acc << '\n';
}

// ---------------------------------------------------------------------------
// Pairwise separation surrogate: a Siamese model trained on verified
// 1-WL-hard pairs (label 1) and random isomorphic copies (label 0), then
// judged with the threshold-plus-reliability criterion.

struct SeparationData {
    std::vector<FamilyPairs> families;      // evaluation pairs
    Dataset train;                          // siamese training examples
};

inline SeparationData make_separation_data(const ExperimentManifest& m) {
    SeparationData d;
    const int total = m.train_pairs;
    const int basic_count = total / 2;
    const int regular_count = total - basic_count;
    d.families.push_back({"wl1-hard-basic", generate_pair_family("wl1-hard-basic", basic_count, m.seed_for("data-basic"))});
    d.families.push_back(
        {"wl1-hard-regular", generate_pair_family("wl1-hard-regular", regular_count, m.seed_for("data-regular"))});

    Rng perm_rng(m.seed_for("data-perm"));
    auto shuffled_identity = [&](int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int i = n - 1; i > 0; --i) std::swap(p[i], p[static_cast<int>(perm_rng.below(i + 1))]);
        return p;
    };
    for (const auto& fam : d.families)
        for (const GraphPair& pair : fam.pairs) {
            Example pos;
            pos.g = pair.first;
            pos.partner = pair.second;
            pos.graph_label = 1;  // the two graphs differ
            d.train.push_back(std::move(pos));
            Example neg;
            neg.g = pair.first;
            neg.partner = pair.first.permuted(shuffled_identity(pair.first.num_nodes()));
            neg.graph_label = 0;
            d.train.push_back(std::move(neg));
        }
    return d;
}

struct SeparationRun {
    std::string mode;
    ModelParams params;
    ModelConfig model;
    TrainConfig config;
    double epsilon = 0.0;
    SuiteReport report;
    TrainHistory history;
};

// Canned desk-scale experiment presets shared by `reproduce` and the
// acceptance gate. `scale` shrinks epochs and dataset sizes proportionally.
inline ExperimentManifest canned_manifest(const std::string& name, double scale = 1.0) {
    if (scale <= 0.0) throw ValidationError("scale: must be > 0");
    auto scaled = [&](int v) { return std::max(1, static_cast<int>(std::lround(v * scale))); };
    ExperimentManifest m;
    m.name = name;
    m.master_seed = 9122;
    m.model.layers = 6;
    m.model.hidden_dim = 32;
    m.model.rnf_dim = 32;
    m.train.lr = 2e-3;
    m.train.contrastive_weight = 1.0;
    m.train.k = 1;
    m.num_seeds = 3;
    if (name == "triangle-interp" || name == "triangle-extrap") {
        m.dataset = "triangle-ba";
        m.train_graphs = scaled(20);
        m.test_graphs = std::max(2, scaled(5));
        m.n = 100;
        m.m_train = 2;
        m.m_test = name == "triangle-extrap" ? 3 : 2;
        m.train.epochs = scaled(500);
        m.train.task = TaskKind::NodeBinary;
        m.model.readout = Readout::Node;
        m.modes = {"constant", "rni", "siri"};
        m.invariance_T = std::max(10, scaled(200));
        m.invariance_graphs = std::max(1, scaled(5));
        m.invariance_seeds = 3;
        return m;
    }
    if (name == "convergence") {
        m.dataset = "pair-classification";
        m.pair_family = "wl1-hard-basic";
        m.train_pairs = scaled(20);
        m.test_pairs = std::max(2, scaled(5));
        m.model.layers = 4;
        m.train.epochs = scaled(400);
        m.train.task = TaskKind::GraphBinary;
        m.model.readout = Readout::GraphSumMlp;
        m.modes = {"rni", "siri"};
        return m;
    }
    if (name == "separation") {
        m.dataset = "pair-separation";
        m.train_pairs = scaled(10);
        m.model.layers = 4;
        m.train.epochs = scaled(400);
        m.train.task = TaskKind::PairSiamese;
        m.model.pair_head = true;
        m.modes = {"constant", "siri"};
        m.num_seeds = 1;
        m.pair_S = 16;
        return m;
    }
    throw ValidationError("name: unknown experiment '" + name +
                          "' (expected triangle-interp|triangle-extrap|convergence|separation)");
}

inline SeparationRun run_separation_mode(const SeparationData& data, const ExperimentManifest& m, TrainMode mode,
                                         int seed_index = 0) {
    SeparationRun run;
    run.mode = to_string(mode);
    run.model = model_for_mode(m.model, mode);
    run.model.readout = Readout::Node;  // trunk only; pooling happens in the pair head
    run.model.out_dim = 2;
    run.model.pair_head = true;
    run.config.mode = mode;
    run.config.k = m.train.k;
    run.config.epochs = m.train.epochs;
    run.config.lr = m.train.lr;
    run.config.task = TaskKind::PairSiamese;
    run.config.contrastive_weight = m.train.contrastive_weight;
    run.config.seed = m.seed_for("train-sep-" + run.mode, static_cast<std::uint64_t>(seed_index));

    TrainResult res = train(data.train, {}, run.model, run.config);
    run.params = std::move(res.params);
    run.history = std::move(res.history);

    std::vector<GraphPair> all_pairs;
    for (const auto& fam : data.families)
        all_pairs.insert(all_pairs.end(), fam.pairs.begin(), fam.pairs.end());
    run.epsilon = m.epsilon > 0.0
                      ? m.epsilon
                      : calibrate_epsilon(run.params, run.model, all_pairs, m.pair_S, m.seed_for("calibration"));
    run.report = run_suite(run.params, run.model, data.families, m.pair_S, run.epsilon, m.seed_for("suite"));
    return run;
}

}  // namespace siri
