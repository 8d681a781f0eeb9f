#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "siri/errors.hpp"
#include "siri/graph.hpp"
#include "siri/model.hpp"
#include "siri/rng.hpp"
#include "siri/tensor.hpp"

namespace siri {

// Anything that maps (graph, RNF matrix) to per-node hard predictions.
// predict_variants evaluates the target node's prediction under T single-row
// replacements of the reference draw; the default just loops predict.
class InvariancePredictor {
public:
    virtual ~InvariancePredictor() = default;

    virtual std::vector<int> predict(const Graph& g, const Tensor& rnf) const = 0;

    virtual std::vector<int> predict_variants(const Graph& g, const Tensor& reference, int node,
                                              const std::vector<Tensor>& replacement_rows) const {
        std::vector<int> out;
        out.reserve(replacement_rows.size());
        Tensor work = reference;
        for (const Tensor& row : replacement_rows) {
            for (int j = 0; j < work.cols; ++j) work.at(node, j) = row.data[j];
            out.push_back(predict(g, work)[node]);
        }
        return out;
    }
};

// GNN with node readout; batches all T variant forwards into stacked matmuls.
class GnnPredictor : public InvariancePredictor {
public:
    GnnPredictor(const ModelParams& params, const ModelConfig& cfg) : params_(params), cfg_(cfg) {
        if (cfg.readout != Readout::Node)
            throw ValidationError("readout: invariance protocol requires node readout");
    }

    std::vector<int> predict(const Graph& g, const Tensor& rnf) const override {
        return predict_nodes(params_, cfg_, g, rnf);
    }

    std::vector<int> predict_variants(const Graph& g, const Tensor& reference, int node,
                                      const std::vector<Tensor>& replacement_rows) const override {
        const int n = g.num_nodes();
        const int copies = static_cast<int>(replacement_rows.size());
        Tensor h0_ref = augment_features(g, reference, cfg_);
        Tensor h0(copies * n, h0_ref.cols);
        const int x_cols = h0_ref.cols - cfg_.rnf_dim;
        for (int b = 0; b < copies; ++b) {
            for (int i = 0; i < n; ++i) {
                double* dst = h0.row(b * n + i);
                const double* src = h0_ref.row(i);
                for (int j = 0; j < h0_ref.cols; ++j) dst[j] = src[j];
            }
            const Tensor& row = replacement_rows[b];
            double* target = h0.row(b * n + node);
            for (int j = 0; j < cfg_.rnf_dim; ++j) target[x_cols + j] = row.data[j];
        }
        Tensor h = gnn_trunk_eval_batched(params_, g, h0, copies);
        Tensor logits = matmul(h, params_.classifier_w);
        std::vector<int> out(copies);
        for (int b = 0; b < copies; ++b) {
            const double* row = logits.row(b * n + node);
            int best = 0;
            for (int j = 1; j < logits.cols; ++j)
                if (row[j] + params_.classifier_b.data[j] > row[best] + params_.classifier_b.data[best]) best = j;
            out[b] = best;
        }
        return out;
    }

private:
    const ModelParams& params_;
    ModelConfig cfg_;
};

// Fraction of T single-node UID resamplings that flip the node's hard
// prediction relative to a fixed reference draw. All other rows stay at the
// reference (whole_matrix=true resamples everything instead).
inline double node_invariance_ratio(const InvariancePredictor& model, const Graph& g, const RnfSpec& spec, int node,
                                    int T, std::uint64_t seed, bool whole_matrix = false) {
    if (T < 1) throw ValidationError("T: must be >= 1");
    if (node < 0 || node >= g.num_nodes()) throw ValidationError("node: out of range");
    Rng rng(derive_seed(seed, "invariance"));
    Tensor reference = spec.sample_rows(rng, g.num_nodes());
    const int ref_pred = model.predict(g, reference)[node];

    int changes = 0;
    if (whole_matrix) {
        for (int t = 0; t < T; ++t) {
            Tensor fresh = spec.sample_rows(rng, g.num_nodes());
            if (model.predict(g, fresh)[node] != ref_pred) ++changes;
        }
    } else {
        std::vector<Tensor> rows;
        rows.reserve(T);
        for (int t = 0; t < T; ++t) rows.push_back(spec.sample_rows(rng, 1));
        std::vector<int> preds = model.predict_variants(g, reference, node, rows);
        for (int p : preds)
            if (p != ref_pred) ++changes;
    }
    return static_cast<double>(changes) / static_cast<double>(T);
}

struct InvarianceReport {
    struct SetStats {
        std::vector<double> per_seed_means;  // one set-level mean per seed
        double mean = 0.0;
        double stddev = 0.0;
        std::vector<double> node_ratios;  // per node, averaged over seeds
    };
    SetStats train, test;
    int resamples = 0;
    std::vector<std::uint64_t> seeds;
};

namespace detail {

inline void finalize_set_stats(InvarianceReport::SetStats& s) {
    if (s.per_seed_means.empty()) return;
    double acc = 0.0;
    for (double m : s.per_seed_means) acc += m;
    s.mean = acc / static_cast<double>(s.per_seed_means.size());
    double var = 0.0;
    for (double m : s.per_seed_means) var += (m - s.mean) * (m - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(s.per_seed_means.size()));
}

inline std::vector<double> set_node_ratios(const InvariancePredictor& model, const std::vector<Graph>& graphs,
                                           const RnfSpec& spec, int T, std::uint64_t seed, bool whole_matrix) {
    std::vector<double> out;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const Graph& g = graphs[gi];
        for (int v = 0; v < g.num_nodes(); ++v)
            out.push_back(node_invariance_ratio(model, g, spec,
                                                v, T, derive_seed(seed, "invariance-node", (gi << 32) | static_cast<std::uint64_t>(v)),
                                                whole_matrix));
    }
    return out;
}

}  // namespace detail

// Set-level protocol: per-node ratios averaged within each set per seed, then
// mean +- stddev across seeds.
inline InvarianceReport set_invariance_report(const InvariancePredictor& model, const std::vector<Graph>& train_graphs,
                                              const std::vector<Graph>& test_graphs, const RnfSpec& spec, int T,
                                              const std::vector<std::uint64_t>& seeds, bool whole_matrix = false) {
    if (T < 1) throw ValidationError("T: must be >= 1");
    if (seeds.empty()) throw ValidationError("seeds: need at least one");
    InvarianceReport report;
    report.resamples = T;
    report.seeds = seeds;
    auto run_set = [&](const std::vector<Graph>& graphs, InvarianceReport::SetStats& stats) {
        std::vector<double> mean_ratios;
        for (std::uint64_t seed : seeds) {
            std::vector<double> ratios = detail::set_node_ratios(model, graphs, spec, T, seed, whole_matrix);
            if (mean_ratios.empty()) mean_ratios.assign(ratios.size(), 0.0);
            double acc = 0.0;
            for (std::size_t i = 0; i < ratios.size(); ++i) {
                acc += ratios[i];
                mean_ratios[i] += ratios[i] / static_cast<double>(seeds.size());
            }
            stats.per_seed_means.push_back(ratios.empty() ? 0.0 : acc / static_cast<double>(ratios.size()));
        }
        stats.node_ratios = std::move(mean_ratios);
        detail::finalize_set_stats(stats);
    };
    run_set(train_graphs, report.train);
    run_set(test_graphs, report.test);
    return report;
}

// CSV: set,node,ratio rows (seed-averaged), then one summary row per set.
inline void write_invariance_csv(const InvarianceReport& r, std::ostream& os) {
    os.precision(17);
    os << "set,node,ratio\n";
    auto rows = [&](const char* name, const InvarianceReport::SetStats& s) {
        for (std::size_t i = 0; i < s.node_ratios.size(); ++i)
            os << name << ',' << i << ',' << s.node_ratios[i] << '\n';
        os << name << ",all," << s.mean << '\n';
    };
    rows("train", r.train);
    rows("test", r.test);
}

inline std::string invariance_summary_line(const InvarianceReport& r, std::size_t seed_index) {
    std::string out = "seed " + std::to_string(r.seeds[seed_index]) + ": train ratio " +
                      std::to_string(r.train.per_seed_means[seed_index]);
    if (!r.test.per_seed_means.empty()) out += ", test ratio " + std::to_string(r.test.per_seed_means[seed_index]);
    return out;
}

}  // namespace siri
