#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "siri/adam.hpp"
#include "siri/errors.hpp"
#include "siri/graph.hpp"
#include "siri/model.hpp"
#include "siri/rng.hpp"
#include "siri/tape.hpp"
#include "siri/tensor.hpp"

namespace siri {

enum class TrainMode { Constant, Rni, Siri };
enum class TaskKind { NodeBinary, GraphBinary, PairSiamese };

inline TrainMode train_mode_from_string(const std::string& s) {
    if (s == "constant") return TrainMode::Constant;
    if (s == "rni") return TrainMode::Rni;
    if (s == "siri") return TrainMode::Siri;
    throw ValidationError("mode: expected constant|rni|siri, got '" + s + "'");
}

inline std::string to_string(TrainMode m) {
    switch (m) {
        case TrainMode::Constant: return "constant";
        case TrainMode::Rni: return "rni";
        default: return "siri";
    }
}

inline TaskKind task_from_string(const std::string& s) {
    if (s == "node-binary") return TaskKind::NodeBinary;
    if (s == "graph-binary") return TaskKind::GraphBinary;
    if (s == "pair-siamese") return TaskKind::PairSiamese;
    throw ValidationError("task: expected node-binary|graph-binary|pair-siamese, got '" + s + "'");
}

inline std::string to_string(TaskKind t) {
    switch (t) {
        case TaskKind::NodeBinary: return "node-binary";
        case TaskKind::GraphBinary: return "graph-binary";
        default: return "pair-siamese";
    }
}

struct TrainConfig {
    TrainMode mode = TrainMode::Siri;
    int k = 1;  // candidate count for furthest-RNF selection (siri only)
    int epochs = 100;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    TaskKind task = TaskKind::NodeBinary;
    double contrastive_weight = 1.0;

    // lr = 0 is allowed: an epoch then provably leaves parameters unchanged.
    void validate() const {
        if (k < 1) throw ValidationError("k: must be >= 1");
        if (epochs < 1) throw ValidationError("epochs: must be >= 1");
        if (lr < 0.0) throw ValidationError("lr: must be >= 0");
    }
};

struct LossBreakdown {
    double task = 0.0;
    double contrastive = 0.0;
    double total = 0.0;
};

struct EpochRecord {
    int epoch = 0;
    LossBreakdown loss;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> records;
};

// One supervised example. Node tasks use node_labels; graph tasks use
// graph_label; pair tasks additionally carry the partner graph, with
// graph_label = 1 meaning "the two graphs differ".
struct Example {
    Graph g;
    std::vector<int> node_labels;
    int graph_label = 0;
    std::optional<Graph> partner;
};

using Dataset = std::vector<Example>;

inline Dataset make_node_dataset(std::vector<Graph> graphs, std::vector<std::vector<int>> labels) {
    Dataset out;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        Example e;
        e.g = std::move(graphs[i]);
        e.node_labels = std::move(labels[i]);
        out.push_back(std::move(e));
    }
    return out;
}

// Raw-tensor twins of the tape losses, for gradient-free candidate scoring.
inline double mse_value(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

inline double cosine_sim_value(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "cosine_similarity");
    const double na = std::sqrt(dot_all(a, a));
    const double nb = std::sqrt(dot_all(b, b));
    if (na == 0.0 || nb == 0.0) throw NumericError("cosine_similarity: zero-norm input");
    return dot_all(a, b) / (na * nb);
}

// ---------------------------------------------------------------------------
// Losses on the tape

// Binary (or multi-class) cross-entropy over logits.
inline Var task_loss(Tape& tape, Var logits, const std::vector<int>& labels) {
    return tape.softmax_cross_entropy(logits, labels);
}

// MSE between two final-GNN-layer embeddings (prior to the classifier).
inline Var contrastive_loss(Tape& tape, Var h1_final, Var h2_final) { return tape.mse(h1_final, h2_final); }

namespace detail {

inline std::vector<int> labels_for(const Example& ex, TaskKind task) {
    if (task == TaskKind::NodeBinary) {
        if (static_cast<int>(ex.node_labels.size()) != ex.g.num_nodes())
            throw ValidationError("node_labels: length != n");
        return ex.node_labels;
    }
    return {ex.graph_label};
}

// Gradient-free furthest-RNF selection: index of the candidate maximizing the
// contrastive MSE against the reference final-layer embedding.
inline int select_furthest_candidate(const ModelParams& p, const ModelConfig& cfg, const Graph& g,
                                     const Tensor& h1_final, const std::vector<Tensor>& candidates) {
    int best = 0;
    double best_loss = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        Tensor h2 = gnn_trunk_eval_batched(p, g, augment_features(g, candidates[i], cfg), 1);
        const double loss = mse_value(h1_final, h2);
        if (loss > best_loss) {
            best_loss = loss;
            best = static_cast<int>(i);
        }
    }
    return best;
}

struct StepOutcome {
    LossBreakdown loss;
    // Hard predictions from the task branch, for running train accuracy.
    std::vector<int> predictions;
};

inline std::vector<int> hard_predictions(const Tensor& logits) {
    std::vector<int> out(logits.rows);
    for (int i = 0; i < logits.rows; ++i) out[i] = argmax_row(logits, i);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single-graph steps (node-binary / graph-binary). The *_with_draws forms take
// explicit RNF draws so behavior is testable without touching the RNG stream.

inline detail::StepOutcome siri_step_with_draws(ModelParams& params, AdamState& adam, const ModelConfig& cfg,
                                                const TrainConfig& tcfg, const Example& ex, const Tensor& r1,
                                                const std::vector<Tensor>& r2_candidates, int* selected = nullptr) {
    const std::vector<int> labels = detail::labels_for(ex, tcfg.task);

    Tape tape;
    ModelVars vars = lift_params(tape, params);
    Var h0_1 = tape.leaf(augment_features(ex.g, r1, cfg));
    ForwardVars f1 = forward_tape(tape, vars, cfg, ex.g, h0_1);

    const int chosen =
        detail::select_furthest_candidate(params, cfg, ex.g, tape.value(f1.h_final), r2_candidates);
    if (selected) *selected = chosen;

    Var h0_2 = tape.leaf(augment_features(ex.g, r2_candidates[chosen], cfg));
    Var h2_final = gnn_trunk(tape, vars, ex.g, h0_2);

    Var l_task = task_loss(tape, f1.logits, labels);
    Var l_con = contrastive_loss(tape, f1.h_final, h2_final);
    Var total = tape.add(l_task, tape.scale(l_con, tcfg.contrastive_weight));
    tape.backward(total);

    std::vector<Tensor> grads = collect_grads(tape, vars);
    std::vector<const Tensor*> grad_ptrs;
    for (const Tensor& t : grads) grad_ptrs.push_back(&t);
    adam.step(params.all(), grad_ptrs);

    detail::StepOutcome out;
    out.loss.task = tape.value(l_task).data[0];
    out.loss.contrastive = tape.value(l_con).data[0];
    out.loss.total = tape.value(total).data[0];
    out.predictions = detail::hard_predictions(tape.value(f1.logits));
    return out;
}

inline detail::StepOutcome rni_step_with_draws(ModelParams& params, AdamState& adam, const ModelConfig& cfg,
                                               const TrainConfig& tcfg, const Example& ex, const Tensor& r1,
                                               const Tensor& r2) {
    const std::vector<int> labels = detail::labels_for(ex, tcfg.task);

    Tape tape;
    ModelVars vars = lift_params(tape, params);
    ForwardVars f1 = forward_tape(tape, vars, cfg, ex.g, tape.leaf(augment_features(ex.g, r1, cfg)));
    ForwardVars f2 = forward_tape(tape, vars, cfg, ex.g, tape.leaf(augment_features(ex.g, r2, cfg)));
    Var total = tape.scale(tape.add(task_loss(tape, f1.logits, labels), task_loss(tape, f2.logits, labels)), 0.5);
    tape.backward(total);

    std::vector<Tensor> grads = collect_grads(tape, vars);
    std::vector<const Tensor*> grad_ptrs;
    for (const Tensor& t : grads) grad_ptrs.push_back(&t);
    adam.step(params.all(), grad_ptrs);

    detail::StepOutcome out;
    out.loss.task = tape.value(total).data[0];
    out.loss.contrastive = 0.0;
    out.loss.total = out.loss.task;
    out.predictions = detail::hard_predictions(tape.value(f1.logits));
    return out;
}

// Constant baseline step: single forward without RNF, task loss only.
inline detail::StepOutcome constant_step(ModelParams& params, AdamState& adam, const ModelConfig& cfg,
                                         const TrainConfig& tcfg, const Example& ex) {
    const std::vector<int> labels = detail::labels_for(ex, tcfg.task);
    Tape tape;
    ModelVars vars = lift_params(tape, params);
    ForwardVars f = forward_tape(tape, vars, cfg, ex.g, tape.leaf(augment_features(ex.g, std::nullopt, cfg)));
    Var total = task_loss(tape, f.logits, labels);
    tape.backward(total);

    std::vector<Tensor> grads = collect_grads(tape, vars);
    std::vector<const Tensor*> grad_ptrs;
    for (const Tensor& t : grads) grad_ptrs.push_back(&t);
    adam.step(params.all(), grad_ptrs);

    detail::StepOutcome out;
    out.loss.task = tape.value(total).data[0];
    out.loss.total = out.loss.task;
    out.predictions = detail::hard_predictions(tape.value(f.logits));
    return out;
}

// ---------------------------------------------------------------------------
// Pair-siamese steps: both graphs pass through the shared trunk, sum-pooled
// embeddings feed a cosine logit head, BCE against "graphs differ".

namespace detail {

struct PairForward {
    Var e1, e2;            // 1 x d pooled embeddings
    Var h1_final, h2_final;
    Var logit;
};

inline PairForward pair_forward(Tape& tape, const ModelVars& vars, const ModelConfig& cfg, const Example& ex,
                                const std::optional<Tensor>& r_a, const std::optional<Tensor>& r_b) {
    if (!ex.partner) throw ValidationError("task: pair-siamese example lacks partner graph");
    if (!vars.pair_w) throw ValidationError("pair_head: model was built without the pair head");
    PairForward out;
    out.h1_final = gnn_trunk(tape, vars, ex.g, tape.leaf(augment_features(ex.g, r_a, cfg)));
    out.h2_final = gnn_trunk(tape, vars, *ex.partner, tape.leaf(augment_features(*ex.partner, r_b, cfg)));
    out.e1 = tape.row_sum_pool(out.h1_final, std::vector<int>(ex.g.num_nodes(), 0), 1);
    out.e2 = tape.row_sum_pool(out.h2_final, std::vector<int>(ex.partner->num_nodes(), 0), 1);
    Var sim = tape.cosine_similarity(out.e1, out.e2);
    Var one = tape.leaf(Tensor::ones(1, 1));
    Var distance = tape.add(one, tape.scale(sim, -1.0));
    out.logit = tape.add(tape.matmul(*vars.pair_w, distance), *vars.pair_b);
    return out;
}

}  // namespace detail

inline detail::StepOutcome siri_pair_step_with_draws(ModelParams& params, AdamState& adam, const ModelConfig& cfg,
                                                     const TrainConfig& tcfg, const Example& ex, const Tensor& r1_a,
                                                     const Tensor& r1_b, const std::vector<Tensor>& r2_a_candidates,
                                                     const std::vector<Tensor>& r2_b_candidates) {
    Tape tape;
    ModelVars vars = lift_params(tape, params);
    detail::PairForward pf = detail::pair_forward(tape, vars, cfg, ex, r1_a, r1_b);

    const int ca = detail::select_furthest_candidate(params, cfg, ex.g, tape.value(pf.h1_final), r2_a_candidates);
    const int cb =
        detail::select_furthest_candidate(params, cfg, *ex.partner, tape.value(pf.h2_final), r2_b_candidates);
    Var h2a = gnn_trunk(tape, vars, ex.g, tape.leaf(augment_features(ex.g, r2_a_candidates[ca], cfg)));
    Var h2b = gnn_trunk(tape, vars, *ex.partner, tape.leaf(augment_features(*ex.partner, r2_b_candidates[cb], cfg)));

    Var l_task = tape.sigmoid_bce(pf.logit, static_cast<double>(ex.graph_label));
    Var l_con = tape.scale(tape.add(contrastive_loss(tape, pf.h1_final, h2a), contrastive_loss(tape, pf.h2_final, h2b)), 0.5);
    Var total = tape.add(l_task, tape.scale(l_con, tcfg.contrastive_weight));
    tape.backward(total);

    std::vector<Tensor> grads = collect_grads(tape, vars);
    std::vector<const Tensor*> grad_ptrs;
    for (const Tensor& t : grads) grad_ptrs.push_back(&t);
    adam.step(params.all(), grad_ptrs);

    detail::StepOutcome out;
    out.loss.task = tape.value(l_task).data[0];
    out.loss.contrastive = tape.value(l_con).data[0];
    out.loss.total = tape.value(total).data[0];
    out.predictions = {tape.value(pf.logit).data[0] > 0.0 ? 1 : 0};
    return out;
}

inline detail::StepOutcome pair_task_step_with_draws(ModelParams& params, AdamState& adam, const ModelConfig& cfg,
                                                     const TrainConfig& tcfg, const Example& ex,
                                                     const std::optional<Tensor>& r_a,
                                                     const std::optional<Tensor>& r_b) {
    Tape tape;
    ModelVars vars = lift_params(tape, params);
    detail::PairForward pf = detail::pair_forward(tape, vars, cfg, ex, r_a, r_b);
    Var total = tape.sigmoid_bce(pf.logit, static_cast<double>(ex.graph_label));
    tape.backward(total);

    std::vector<Tensor> grads = collect_grads(tape, vars);
    std::vector<const Tensor*> grad_ptrs;
    for (const Tensor& t : grads) grad_ptrs.push_back(&t);
    adam.step(params.all(), grad_ptrs);

    detail::StepOutcome out;
    out.loss.task = tape.value(total).data[0];
    out.loss.total = out.loss.task;
    out.predictions = {tape.value(pf.logit).data[0] > 0.0 ? 1 : 0};
    return out;
}

// ---------------------------------------------------------------------------
// Stream-drawing step wrappers

class TrainContext {
public:
    TrainContext(const ModelConfig& mcfg, const TrainConfig& tcfg)
        : mcfg_(mcfg), tcfg_(tcfg) {
        mcfg_.validate();
        tcfg_.validate();
        rnf_.r = mcfg.rnf_dim;
        rnf_.distribution = mcfg.distribution;
        rnf_.stream_seed = derive_seed(tcfg.seed, "train-rnf");
    }

    const RnfSpec& rnf_spec() const { return rnf_; }

    Tensor draw(int n) { return rnf_.sample(n, counter_++); }

    detail::StepOutcome step(ModelParams& params, AdamState& adam, const Example& ex) {
        if (tcfg_.task == TaskKind::PairSiamese) return pair_step(params, adam, ex);
        switch (tcfg_.mode) {
            case TrainMode::Constant:
                return constant_step(params, adam, mcfg_, tcfg_, ex);
            case TrainMode::Rni: {
                Tensor r1 = draw(ex.g.num_nodes());
                Tensor r2 = draw(ex.g.num_nodes());
                return rni_step_with_draws(params, adam, mcfg_, tcfg_, ex, r1, r2);
            }
            case TrainMode::Siri: {
                Tensor r1 = draw(ex.g.num_nodes());
                std::vector<Tensor> candidates;
                for (int i = 0; i < tcfg_.k; ++i) candidates.push_back(draw(ex.g.num_nodes()));
                return siri_step_with_draws(params, adam, mcfg_, tcfg_, ex, r1, candidates);
            }
        }
        throw ValidationError("mode: unknown");
    }

private:
    detail::StepOutcome pair_step(ModelParams& params, AdamState& adam, const Example& ex) {
        const int na = ex.g.num_nodes();
        const int nb = ex.partner ? ex.partner->num_nodes() : 0;
        switch (tcfg_.mode) {
            case TrainMode::Constant:
                return pair_task_step_with_draws(params, adam, mcfg_, tcfg_, ex, std::nullopt, std::nullopt);
            case TrainMode::Rni: {
                Tensor a1 = draw(na), b1 = draw(nb);
                return pair_task_step_with_draws(params, adam, mcfg_, tcfg_, ex, a1, b1);
            }
            case TrainMode::Siri: {
                Tensor a1 = draw(na), b1 = draw(nb);
                std::vector<Tensor> ca, cb;
                for (int i = 0; i < tcfg_.k; ++i) ca.push_back(draw(na));
                for (int i = 0; i < tcfg_.k; ++i) cb.push_back(draw(nb));
                return siri_pair_step_with_draws(params, adam, mcfg_, tcfg_, ex, a1, b1, ca, cb);
            }
        }
        throw ValidationError("mode: unknown");
    }

    ModelConfig mcfg_;
    TrainConfig tcfg_;
    RnfSpec rnf_;
    std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation and the full training loop

// Accuracy with one fresh RNF draw per graph (constant mode: none).
inline double evaluate_accuracy(const ModelParams& params, const ModelConfig& cfg, const TrainConfig& tcfg,
                                const Dataset& data, std::uint64_t draw_seed) {
    if (data.empty()) return 0.0;
    RnfSpec spec{cfg.rnf_dim, cfg.distribution, derive_seed(draw_seed, "eval-rnf")};
    const bool use_rnf = tcfg.mode != TrainMode::Constant && cfg.rnf_dim > 0;
    long correct = 0, total = 0;
    std::uint64_t counter = 0;
    for (const Example& ex : data) {
        if (tcfg.task == TaskKind::NodeBinary) {
            std::optional<Tensor> r;
            if (use_rnf) r = spec.sample(ex.g.num_nodes(), counter++);
            std::vector<int> pred = predict_nodes(params, cfg, ex.g, r);
            for (int v = 0; v < ex.g.num_nodes(); ++v) {
                correct += (pred[v] == ex.node_labels[v]);
                ++total;
            }
        } else if (tcfg.task == TaskKind::GraphBinary) {
            std::optional<Tensor> r;
            if (use_rnf) r = spec.sample(ex.g.num_nodes(), counter++);
            ForwardResult f = forward_eval(params, cfg, ex.g, augment_features(ex.g, r, cfg));
            correct += (argmax_row(f.logits, 0) == ex.graph_label);
            ++total;
        } else {
            std::optional<Tensor> ra, rb;
            if (use_rnf) {
                ra = spec.sample(ex.g.num_nodes(), counter++);
                rb = spec.sample(ex.partner->num_nodes(), counter++);
            }
            Tape tape;
            ModelVars vars = lift_params(tape, params);
            detail::PairForward pf = detail::pair_forward(tape, vars, cfg, ex, ra, rb);
            const int pred = tape.value(pf.logit).data[0] > 0.0 ? 1 : 0;
            correct += (pred == ex.graph_label);
            ++total;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

struct TrainResult {
    ModelParams params;
    TrainHistory history;
};

// Full-batch sequential training: one gradient step per example per epoch,
// dataset order fixed, deterministic given the config seed.
inline TrainResult train(const Dataset& train_set, const Dataset& test_set, const ModelConfig& mcfg,
                         const TrainConfig& tcfg) {
    if (train_set.empty()) throw ValidationError("dataset: empty training set");
    TrainResult out;
    out.params = init_params(mcfg, tcfg.seed);
    AdamState adam{AdamConfig{tcfg.lr}};
    TrainContext ctx(mcfg, tcfg);

    for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
        LossBreakdown sum;
        long correct = 0, total = 0;
        for (const Example& ex : train_set) {
            detail::StepOutcome so = ctx.step(out.params, adam, ex);
            sum.task += so.loss.task;
            sum.contrastive += so.loss.contrastive;
            sum.total += so.loss.total;
            if (tcfg.task == TaskKind::NodeBinary) {
                for (std::size_t v = 0; v < so.predictions.size(); ++v)
                    correct += (so.predictions[v] == ex.node_labels[v]);
                total += static_cast<long>(so.predictions.size());
            } else {
                correct += (so.predictions[0] == ex.graph_label);
                ++total;
            }
        }
        EpochRecord rec;
        rec.epoch = epoch;
        const double inv = 1.0 / static_cast<double>(train_set.size());
        rec.loss.task = sum.task * inv;
        rec.loss.contrastive = sum.contrastive * inv;
        rec.loss.total = sum.total * inv;
        rec.train_acc = static_cast<double>(correct) / static_cast<double>(total);
        rec.test_acc = test_set.empty()
                           ? 0.0
                           : evaluate_accuracy(out.params, mcfg, tcfg, test_set,
                                               derive_seed(tcfg.seed, "eval-epoch", static_cast<std::uint64_t>(epoch)));
        out.history.records.push_back(rec);
    }
    return out;
}

// Metric log: epoch,task_loss,contrastive_loss,total_loss,train_acc,test_acc
inline void write_history_csv(const TrainHistory& h, std::ostream& os) {
    os.precision(17);
    os << "epoch,task_loss,contrastive_loss,total_loss,train_acc,test_acc\n";
    for (const EpochRecord& r : h.records)
        os << r.epoch << ',' << r.loss.task << ',' << r.loss.contrastive << ',' << r.loss.total << ',' << r.train_acc
           << ',' << r.test_acc << '\n';
}

}  // namespace siri
