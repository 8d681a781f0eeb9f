#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "siri/checkpoint.hpp"
#include "siri/errors.hpp"
#include "siri/graph.hpp"
#include "siri/rng.hpp"
#include "siri/tape.hpp"
#include "siri/tensor.hpp"

namespace siri {

enum class Readout { Node, GraphSumMlp };
enum class RnfDistribution { StandardNormal, Uniform01 };

inline Readout readout_from_string(const std::string& s) {
    if (s == "node") return Readout::Node;
    if (s == "graph-sum-mlp") return Readout::GraphSumMlp;
    throw ValidationError("readout: expected 'node' or 'graph-sum-mlp', got '" + s + "'");
}

inline std::string to_string(Readout r) { return r == Readout::Node ? "node" : "graph-sum-mlp"; }

inline RnfDistribution distribution_from_string(const std::string& s) {
    if (s == "standard-normal") return RnfDistribution::StandardNormal;
    if (s == "uniform-01") return RnfDistribution::Uniform01;
    throw ValidationError("distribution: expected 'standard-normal' or 'uniform-01', got '" + s + "'");
}

inline std::string to_string(RnfDistribution d) {
    return d == RnfDistribution::StandardNormal ? "standard-normal" : "uniform-01";
}

// Random node feature distribution plus its seed stream. Draws are indexed by
// a counter so the same spec yields reproducible yet distinct samples.
struct RnfSpec {
    int r = 0;
    RnfDistribution distribution = RnfDistribution::StandardNormal;
    std::uint64_t stream_seed = 0;

    // n x r sample; counter selects the draw within the stream.
    Tensor sample(int n, std::uint64_t counter) const {
        if (r < 0) throw ValidationError("r: must be >= 0");
        Rng rng(derive_seed(stream_seed, "rnf-draw", counter));
        Tensor out(n, r);
        for (double& v : out.data)
            v = distribution == RnfDistribution::StandardNormal ? rng.normal() : rng.uniform01();
        return out;
    }

    // Sequential draws from an already-positioned stream (invariance resampling).
    Tensor sample_rows(Rng& rng, int rows) const {
        Tensor out(rows, r);
        for (double& v : out.data)
            v = distribution == RnfDistribution::StandardNormal ? rng.normal() : rng.uniform01();
        return out;
    }
};

struct ModelConfig {
    int layers = 6;
    int hidden_dim = 64;
    int rnf_dim = 64;
    int input_dim = 1;  // d0; constant-1 column when the graph has no features
    int out_dim = 2;
    Readout readout = Readout::Node;
    RnfDistribution distribution = RnfDistribution::StandardNormal;
    bool pair_head = false;  // cosine logit head for pair-siamese training

    int in_width() const { return input_dim + rnf_dim; }

    void validate() const {
        if (layers < 1) throw ValidationError("layers: must be >= 1");
        if (hidden_dim < 1) throw ValidationError("hidden_dim: must be >= 1");
        if (rnf_dim < 0) throw ValidationError("rnf_dim: must be >= 0");
        if (input_dim < 1) throw ValidationError("input_dim: must be >= 1");
        if (out_dim < 1) throw ValidationError("out_dim: must be >= 1");
    }
};

// One GraphConv layer: self transform, neighbor-sum transform, bias.
struct LayerWeights {
    Tensor w_self;
    Tensor w_neigh;
    Tensor bias;
};

struct ModelParams {
    std::vector<LayerWeights> layers;
    Tensor classifier_w, classifier_b;
    std::optional<LayerWeights> mlp1, mlp2;  // readout MLP hidden layers (graph-sum-mlp); w_neigh unused
    std::optional<Tensor> pair_w, pair_b;    // 1x1 scalars for the pair-cosine head

    std::vector<Tensor*> all() {
        std::vector<Tensor*> out;
        for (auto& l : layers) {
            out.push_back(&l.w_self);
            out.push_back(&l.w_neigh);
            out.push_back(&l.bias);
        }
        out.push_back(&classifier_w);
        out.push_back(&classifier_b);
        if (mlp1) {
            out.push_back(&mlp1->w_self);
            out.push_back(&mlp1->bias);
        }
        if (mlp2) {
            out.push_back(&mlp2->w_self);
            out.push_back(&mlp2->bias);
        }
        if (pair_w) out.push_back(&*pair_w);
        if (pair_b) out.push_back(&*pair_b);
        return out;
    }

    std::vector<const Tensor*> all() const {
        auto mut = const_cast<ModelParams*>(this)->all();
        return {mut.begin(), mut.end()};
    }

    NamedTensors named() const {
        NamedTensors out;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const std::string p = "layer" + std::to_string(l) + ".";
            out.emplace_back(p + "w_self", layers[l].w_self);
            out.emplace_back(p + "w_neigh", layers[l].w_neigh);
            out.emplace_back(p + "bias", layers[l].bias);
        }
        out.emplace_back("classifier.w", classifier_w);
        out.emplace_back("classifier.b", classifier_b);
        if (mlp1) {
            out.emplace_back("readout1.w", mlp1->w_self);
            out.emplace_back("readout1.b", mlp1->bias);
        }
        if (mlp2) {
            out.emplace_back("readout2.w", mlp2->w_self);
            out.emplace_back("readout2.b", mlp2->bias);
        }
        if (pair_w) out.emplace_back("pair.w", *pair_w);
        if (pair_b) out.emplace_back("pair.b", *pair_b);
        return out;
    }
};

// Glorot-uniform weights, zero biases; deterministic given seed.
inline ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(derive_seed(seed, "init"));
    auto glorot = [&](int fan_in, int fan_out) {
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        Tensor t(fan_in, fan_out);
        for (double& v : t.data) v = rng.uniform(-a, a);
        return t;
    };
    ModelParams p;
    int d_in = cfg.in_width();
    for (int l = 0; l < cfg.layers; ++l) {
        LayerWeights lw;
        lw.w_self = glorot(d_in, cfg.hidden_dim);
        lw.w_neigh = glorot(d_in, cfg.hidden_dim);
        lw.bias = Tensor(1, cfg.hidden_dim);
        p.layers.push_back(std::move(lw));
        d_in = cfg.hidden_dim;
    }
    p.classifier_w = glorot(cfg.hidden_dim, cfg.out_dim);
    p.classifier_b = Tensor(1, cfg.out_dim);
    if (cfg.readout == Readout::GraphSumMlp) {
        LayerWeights m1, m2;
        m1.w_self = glorot(cfg.hidden_dim, cfg.hidden_dim);
        m1.bias = Tensor(1, cfg.hidden_dim);
        m2.w_self = glorot(cfg.hidden_dim, cfg.hidden_dim);
        m2.bias = Tensor(1, cfg.hidden_dim);
        p.mlp1 = std::move(m1);
        p.mlp2 = std::move(m2);
    }
    if (cfg.pair_head) {
        p.pair_w = Tensor::filled(1, 1, 1.0);
        p.pair_b = Tensor(1, 1);
    }
    return p;
}

// H0 = X ; R. When the graph carries no features, X is the all-ones column.
// An absent sample with rnf_dim > 0 contributes zero columns (constant mode
// run through an RNF-shaped architecture).
inline Tensor augment_features(const Graph& g, const std::optional<Tensor>& rnf, const ModelConfig& cfg) {
    const int n = g.num_nodes();
    Tensor x;
    if (g.has_features()) {
        if (g.features().cols != cfg.input_dim)
            throw ValidationError("input_dim: graph features have d0=" + std::to_string(g.features().cols) +
                                  ", config says " + std::to_string(cfg.input_dim));
        x = g.features();
    } else {
        if (cfg.input_dim != 1)
            throw ValidationError("input_dim: featureless graph requires input_dim=1 (constant feature)");
        x = Tensor::ones(n, 1);
    }
    if (cfg.rnf_dim == 0) {
        if (rnf && rnf->cols != 0) throw ValidationError("rnf_dim: sample provided but rnf_dim=0");
        return x;
    }
    Tensor r = rnf ? *rnf : Tensor(n, cfg.rnf_dim);
    if (r.rows != n) throw DimensionError("augment_features: rnf rows " + std::to_string(r.rows) + " vs n " + std::to_string(n));
    if (r.cols != cfg.rnf_dim)
        throw DimensionError("augment_features: rnf cols " + std::to_string(r.cols) + " vs rnf_dim " + std::to_string(cfg.rnf_dim));
    Tensor h0(n, x.cols + r.cols);
    for (int i = 0; i < n; ++i) {
        double* row = h0.row(i);
        const double* xr = x.row(i);
        const double* rr = r.row(i);
        for (int j = 0; j < x.cols; ++j) row[j] = xr[j];
        for (int j = 0; j < r.cols; ++j) row[x.cols + j] = rr[j];
    }
    return h0;
}

// ---------------------------------------------------------------------------
// Differentiable forward (training path)

struct ModelVars {
    struct LayerVars {
        Var w_self, w_neigh, bias;
    };
    std::vector<LayerVars> layers;
    Var cls_w, cls_b;
    std::optional<LayerVars> mlp1, mlp2;
    std::optional<Var> pair_w, pair_b;

    // Leaf order must match ModelParams::all().
    std::vector<Var> all() const {
        std::vector<Var> out;
        for (const auto& l : layers) {
            out.push_back(l.w_self);
            out.push_back(l.w_neigh);
            out.push_back(l.bias);
        }
        out.push_back(cls_w);
        out.push_back(cls_b);
        if (mlp1) {
            out.push_back(mlp1->w_self);
            out.push_back(mlp1->bias);
        }
        if (mlp2) {
            out.push_back(mlp2->w_self);
            out.push_back(mlp2->bias);
        }
        if (pair_w) out.push_back(*pair_w);
        if (pair_b) out.push_back(*pair_b);
        return out;
    }
};

inline ModelVars lift_params(Tape& tape, const ModelParams& p) {
    ModelVars v;
    for (const auto& l : p.layers)
        v.layers.push_back({tape.leaf(l.w_self), tape.leaf(l.w_neigh), tape.leaf(l.bias)});
    v.cls_w = tape.leaf(p.classifier_w);
    v.cls_b = tape.leaf(p.classifier_b);
    if (p.mlp1) v.mlp1 = ModelVars::LayerVars{tape.leaf(p.mlp1->w_self), Var{}, tape.leaf(p.mlp1->bias)};
    if (p.mlp2) v.mlp2 = ModelVars::LayerVars{tape.leaf(p.mlp2->w_self), Var{}, tape.leaf(p.mlp2->bias)};
    if (p.pair_w) v.pair_w = tape.leaf(*p.pair_w);
    if (p.pair_b) v.pair_b = tape.leaf(*p.pair_b);
    return v;
}

inline std::vector<Tensor> collect_grads(const Tape& tape, const ModelVars& vars) {
    std::vector<Tensor> out;
    for (Var v : vars.all()) out.push_back(tape.grad(v));
    return out;
}

struct ForwardVars {
    Var h_final;  // n x d node embeddings after the last GNN layer
    Var logits;   // n x out (node readout) or 1 x out (graph readout)
    Var pooled;   // 1 x d sum-pooled embedding (graph readout only)
};

// The message-passing trunk: H <- relu(H W_self + (A H) W_neigh + bias).
inline Var gnn_trunk(Tape& tape, const ModelVars& vars, const Graph& g, Var h0) {
    Var h = h0;
    for (const auto& l : vars.layers) {
        Var self_term = tape.matmul(h, l.w_self);
        Var neigh_term = tape.matmul(tape.aggregate_neighbors(h, g), l.w_neigh);
        h = tape.relu(tape.add_bias_row(tape.add(self_term, neigh_term), l.bias));
    }
    return h;
}

inline ForwardVars forward_tape(Tape& tape, const ModelVars& vars, const ModelConfig& cfg, const Graph& g, Var h0) {
    ForwardVars out;
    out.h_final = gnn_trunk(tape, vars, g, h0);
    if (cfg.readout == Readout::Node) {
        out.logits = tape.add_bias_row(tape.matmul(out.h_final, vars.cls_w), vars.cls_b);
    } else {
        out.pooled = tape.row_sum_pool(out.h_final, std::vector<int>(g.num_nodes(), 0), 1);
        Var z = tape.relu(tape.add_bias_row(tape.matmul(out.pooled, vars.mlp1->w_self), vars.mlp1->bias));
        z = tape.relu(tape.add_bias_row(tape.matmul(z, vars.mlp2->w_self), vars.mlp2->bias));
        out.logits = tape.add_bias_row(tape.matmul(z, vars.cls_w), vars.cls_b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inference forward (no tape), plus a batched variant that evaluates B
// stacked copies of H0 against one parameter set in single matmuls.

struct ForwardResult {
    Tensor h_final;
    Tensor logits;
    Tensor pooled;
};

namespace detail {

// src and dst are B stacked n-row blocks; scatter applied per block.
inline void scatter_edges_batched(const Graph& g, int copies, const Tensor& src, Tensor& dst) {
    const int n = g.num_nodes();
    const int c = src.cols;
    for (int b = 0; b < copies; ++b) {
        const int off = b * n;
        for (auto [u, v] : g.edges()) {
            const double* su = src.row(off + u);
            const double* sv = src.row(off + v);
            double* du = dst.row(off + u);
            double* dv = dst.row(off + v);
            for (int j = 0; j < c; ++j) {
                dv[j] += su[j];
                du[j] += sv[j];
            }
        }
    }
}

inline void add_bias_relu_inplace(Tensor& t, const Tensor& bias) {
    for (int i = 0; i < t.rows; ++i) {
        double* row = t.row(i);
        for (int j = 0; j < t.cols; ++j) {
            const double v = row[j] + bias.data[j];
            row[j] = v > 0.0 ? v : 0.0;
        }
    }
}

}  // namespace detail

// h0 holds `copies` stacked n x in_width blocks (copies == 1 for the plain case).
inline Tensor gnn_trunk_eval_batched(const ModelParams& p, const Graph& g, const Tensor& h0, int copies) {
    if (h0.rows != copies * g.num_nodes())
        throw DimensionError("gnn_trunk_eval: h0 rows " + std::to_string(h0.rows) + " vs copies*n");
    Tensor h = h0;
    Tensor agg, self_term, neigh_term;
    for (const auto& l : p.layers) {
        agg = Tensor(h.rows, h.cols);
        detail::scatter_edges_batched(g, copies, h, agg);
        matmul_into(h, l.w_self, self_term);
        matmul_into(agg, l.w_neigh, neigh_term);
        add_scaled(self_term, neigh_term, 1.0);
        detail::add_bias_relu_inplace(self_term, l.bias);
        h = self_term;
    }
    return h;
}

inline ForwardResult forward_eval(const ModelParams& p, const ModelConfig& cfg, const Graph& g, const Tensor& h0) {
    ForwardResult out;
    out.h_final = gnn_trunk_eval_batched(p, g, h0, 1);
    if (cfg.readout == Readout::Node) {
        out.logits = matmul(out.h_final, p.classifier_w);
        for (int i = 0; i < out.logits.rows; ++i)
            for (int j = 0; j < out.logits.cols; ++j) out.logits.at(i, j) += p.classifier_b.data[j];
    } else {
        out.pooled = Tensor(1, out.h_final.cols);
        for (int i = 0; i < out.h_final.rows; ++i) {
            const double* row = out.h_final.row(i);
            for (int j = 0; j < out.h_final.cols; ++j) out.pooled.data[j] += row[j];
        }
        Tensor z = matmul(out.pooled, p.mlp1->w_self);
        detail::add_bias_relu_inplace(z, p.mlp1->bias);
        z = matmul(z, p.mlp2->w_self);
        detail::add_bias_relu_inplace(z, p.mlp2->bias);
        out.logits = matmul(z, p.classifier_w);
        for (int j = 0; j < out.logits.cols; ++j) out.logits.data[j] += p.classifier_b.data[j];
    }
    return out;
}

inline int argmax_row(const Tensor& t, int row) {
    int best = 0;
    for (int j = 1; j < t.cols; ++j)
        if (t.at(row, j) > t.at(row, best)) best = j;
    return best;
}

// Per-node hard predictions under one RNF draw (node readout).
inline std::vector<int> predict_nodes(const ModelParams& p, const ModelConfig& cfg, const Graph& g,
                                      const std::optional<Tensor>& rnf) {
    if (cfg.readout != Readout::Node) throw ValidationError("readout: predict_nodes requires node readout");
    ForwardResult r = forward_eval(p, cfg, g, augment_features(g, rnf, cfg));
    std::vector<int> out(g.num_nodes());
    for (int v = 0; v < g.num_nodes(); ++v) out[v] = argmax_row(r.logits, v);
    return out;
}

// ---------------------------------------------------------------------------
// Model config file: key=value lines.

inline void write_model_config(const ModelConfig& cfg, std::ostream& os) {
    os << "layers = " << cfg.layers << '\n'
       << "hidden_dim = " << cfg.hidden_dim << '\n'
       << "rnf_dim = " << cfg.rnf_dim << '\n'
       << "input_dim = " << cfg.input_dim << '\n'
       << "out_dim = " << cfg.out_dim << '\n'
       << "readout = " << to_string(cfg.readout) << '\n'
       << "activation = relu\n"
       << "distribution = " << to_string(cfg.distribution) << '\n'
       << "pair_head = " << (cfg.pair_head ? 1 : 0) << '\n';
}

// Rebuilds a ModelParams from named checkpoint tensors, validating shapes
// against the config.
inline ModelParams params_from_named(const ModelConfig& cfg, const NamedTensors& named) {
    ModelParams p = init_params(cfg, 0);
    auto find = [&](const std::string& name) -> const Tensor& {
        for (const auto& [k, t] : named)
            if (k == name) return t;
        throw ValidationError("checkpoint: missing tensor '" + name + "'");
    };
    auto assign = [&](Tensor& dst, const std::string& name) {
        const Tensor& src = find(name);
        require_same_shape(dst, src, "checkpoint load");
        dst = src;
    };
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const std::string pre = "layer" + std::to_string(l) + ".";
        assign(p.layers[l].w_self, pre + "w_self");
        assign(p.layers[l].w_neigh, pre + "w_neigh");
        assign(p.layers[l].bias, pre + "bias");
    }
    assign(p.classifier_w, "classifier.w");
    assign(p.classifier_b, "classifier.b");
    if (p.mlp1) {
        assign(p.mlp1->w_self, "readout1.w");
        assign(p.mlp1->bias, "readout1.b");
        assign(p.mlp2->w_self, "readout2.w");
        assign(p.mlp2->bias, "readout2.b");
    }
    if (p.pair_w) {
        assign(*p.pair_w, "pair.w");
        assign(*p.pair_b, "pair.b");
    }
    return p;
}

}  // namespace siri
