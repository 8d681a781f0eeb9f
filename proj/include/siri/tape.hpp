#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "siri/errors.hpp"
#include "siri/graph.hpp"
#include "siri/tensor.hpp"

namespace siri {

// Handle into a Tape's node list.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// Reverse-mode tape over Tensor-valued primitives. Creation order is
// topological order; backward() walks it once in reverse and accumulates
// gradients additively into every node, leaves included.
//
// A tape is single-user during one forward/backward pass; build a fresh one
// per training step.
class Tape {
public:
    Var leaf(Tensor value) { return push(std::move(value), {}); }

    const Tensor& value(Var v) const { return nodes_[check(v)].value; }
    const Tensor& grad(Var v) const { return nodes_[check(v)].grad; }

    std::size_t num_nodes() const { return nodes_.size(); }

    Var matmul(Var a, Var b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (ta.cols != tb.rows)
            throw DimensionError("matmul: inner dimensions " + ta.shape_str() + " vs " + tb.shape_str());
        Tensor out;
        matmul_into(ta, tb, out);
        return push(std::move(out), [a, b](Tape& t, const Tensor& g) {
            matmul_nt_accum(g, t.nodes_[b.id].value, t.nodes_[a.id].grad);
            matmul_tn_accum(t.nodes_[a.id].value, g, t.nodes_[b.id].grad);
        });
    }

    Var add(Var a, Var b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        require_same_shape(ta, tb, "add");
        Tensor out = ta;
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += tb.data[i];
        return push(std::move(out), [a, b](Tape& t, const Tensor& g) {
            add_scaled(t.nodes_[a.id].grad, g, 1.0);
            add_scaled(t.nodes_[b.id].grad, g, 1.0);
        });
    }

    // a is n x c, bias is 1 x c, broadcast over rows.
    Var add_bias_row(Var a, Var bias) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(bias);
        if (tb.rows != 1 || tb.cols != ta.cols)
            throw DimensionError("add_bias_row: bias " + tb.shape_str() + " vs input " + ta.shape_str());
        Tensor out = ta;
        for (int i = 0; i < out.rows; ++i) {
            double* row = out.row(i);
            for (int j = 0; j < out.cols; ++j) row[j] += tb.data[j];
        }
        return push(std::move(out), [a, bias](Tape& t, const Tensor& g) {
            add_scaled(t.nodes_[a.id].grad, g, 1.0);
            Tensor& gb = t.nodes_[bias.id].grad;
            for (int i = 0; i < g.rows; ++i) {
                const double* row = g.row(i);
                for (int j = 0; j < g.cols; ++j) gb.data[j] += row[j];
            }
        });
    }

    Var concat_cols(Var a, Var b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        if (ta.rows != tb.rows)
            throw DimensionError("concat_cols: row counts " + ta.shape_str() + " vs " + tb.shape_str());
        Tensor out(ta.rows, ta.cols + tb.cols);
        for (int i = 0; i < ta.rows; ++i) {
            double* row = out.row(i);
            const double* ra = ta.row(i);
            const double* rb = tb.row(i);
            for (int j = 0; j < ta.cols; ++j) row[j] = ra[j];
            for (int j = 0; j < tb.cols; ++j) row[ta.cols + j] = rb[j];
        }
        const int ca = ta.cols;
        return push(std::move(out), [a, b, ca](Tape& t, const Tensor& g) {
            Tensor& ga = t.nodes_[a.id].grad;
            Tensor& gb = t.nodes_[b.id].grad;
            for (int i = 0; i < g.rows; ++i) {
                const double* row = g.row(i);
                double* ra = ga.row(i);
                double* rb = gb.row(i);
                for (int j = 0; j < ca; ++j) ra[j] += row[j];
                for (int j = 0; j < g.cols - ca; ++j) rb[j] += row[ca + j];
            }
        });
    }

    Var relu(Var a) {
        Tensor out = value(a);
        for (double& v : out.data) v = v > 0.0 ? v : 0.0;
        return push(std::move(out), [a](Tape& t, const Tensor& g) {
            const Tensor& in = t.nodes_[a.id].value;
            Tensor& ga = t.nodes_[a.id].grad;
            for (std::size_t i = 0; i < g.data.size(); ++i)
                if (in.data[i] > 0.0) ga.data[i] += g.data[i];
        });
    }

    // Sums rows by segment id into num_segments output rows.
    Var row_sum_pool(Var a, std::vector<int> segments, int num_segments) {
        const Tensor& ta = value(a);
        if (static_cast<int>(segments.size()) != ta.rows)
            throw DimensionError("row_sum_pool: segment ids (" + std::to_string(segments.size()) + ") vs rows " +
                                 ta.shape_str());
        for (int s : segments)
            if (s < 0 || s >= num_segments) throw ValidationError("row_sum_pool: segment id out of range");
        Tensor out(num_segments, ta.cols);
        for (int i = 0; i < ta.rows; ++i) {
            const double* src = ta.row(i);
            double* dst = out.row(segments[i]);
            for (int j = 0; j < ta.cols; ++j) dst[j] += src[j];
        }
        return push(std::move(out), [a, segs = std::move(segments)](Tape& t, const Tensor& g) {
            Tensor& ga = t.nodes_[a.id].grad;
            for (int i = 0; i < ga.rows; ++i) {
                const double* src = g.row(segs[i]);
                double* dst = ga.row(i);
                for (int j = 0; j < g.cols; ++j) dst[j] += src[j];
            }
        });
    }

    // out[v] = sum of h rows over neighbors of v; adjacency applied as a
    // sparse edge-pair scatter-add. Symmetric, so the backward pass is the
    // same scatter on the upstream gradient.
    Var aggregate_neighbors(Var h, const Graph& g) {
        const Tensor& th = value(h);
        if (th.rows != g.num_nodes())
            throw DimensionError("aggregate_neighbors: rows " + th.shape_str() + " vs n=" +
                                 std::to_string(g.num_nodes()));
        Tensor out(th.rows, th.cols);
        scatter_edges(g, th, out);
        return push(std::move(out), [h, &g](Tape& t, const Tensor& up) {
            scatter_edges(g, up, t.nodes_[h.id].grad);
        });
    }

    // Mean squared error over all entries; 1x1 output.
    Var mse(Var a, Var b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        require_same_shape(ta, tb, "mse");
        const double inv_n = 1.0 / static_cast<double>(ta.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < ta.data.size(); ++i) {
            const double d = ta.data[i] - tb.data[i];
            acc += d * d;
        }
        Tensor out(1, 1);
        out.data[0] = acc * inv_n;
        return push(std::move(out), [a, b, inv_n](Tape& t, const Tensor& g) {
            const Tensor& ta = t.nodes_[a.id].value;
            const Tensor& tb = t.nodes_[b.id].value;
            Tensor& ga = t.nodes_[a.id].grad;
            Tensor& gb = t.nodes_[b.id].grad;
            const double c = 2.0 * inv_n * g.data[0];
            for (std::size_t i = 0; i < ta.data.size(); ++i) {
                const double d = c * (ta.data[i] - tb.data[i]);
                ga.data[i] += d;
                gb.data[i] -= d;
            }
        });
    }

    // Mean over rows of -log softmax(logits)[label]; 1x1 output.
    Var softmax_cross_entropy(Var logits, std::vector<int> labels) {
        const Tensor& tl = value(logits);
        if (static_cast<int>(labels.size()) != tl.rows)
            throw DimensionError("softmax_cross_entropy: labels (" + std::to_string(labels.size()) + ") vs logits " +
                                 tl.shape_str());
        for (int y : labels)
            if (y < 0 || y >= tl.cols) throw ValidationError("label out of range [0," + std::to_string(tl.cols) + ")");
        Tensor probs(tl.rows, tl.cols);
        double loss = 0.0;
        for (int i = 0; i < tl.rows; ++i) {
            const double* row = tl.row(i);
            double mx = row[0];
            for (int j = 1; j < tl.cols; ++j) mx = std::max(mx, row[j]);
            double z = 0.0;
            for (int j = 0; j < tl.cols; ++j) z += std::exp(row[j] - mx);
            const double log_z = std::log(z) + mx;
            double* prow = probs.row(i);
            for (int j = 0; j < tl.cols; ++j) prow[j] = std::exp(row[j] - log_z);
            loss -= row[labels[i]] - log_z;
        }
        const double inv_rows = 1.0 / tl.rows;
        Tensor out(1, 1);
        out.data[0] = loss * inv_rows;
        return push(std::move(out),
                    [logits, probs = std::move(probs), ys = std::move(labels), inv_rows](Tape& t, const Tensor& g) {
                        Tensor& gl = t.nodes_[logits.id].grad;
                        const double c = g.data[0] * inv_rows;
                        for (int i = 0; i < gl.rows; ++i) {
                            const double* prow = probs.row(i);
                            double* grow = gl.row(i);
                            for (int j = 0; j < gl.cols; ++j) grow[j] += c * prow[j];
                            grow[ys[i]] -= c;
                        }
                    });
    }

    // Sum of all entries; 1x1 output.
    Var scalar_sum(Var a) {
        const Tensor& ta = value(a);
        double acc = 0.0;
        for (double v : ta.data) acc += v;
        Tensor out(1, 1);
        out.data[0] = acc;
        return push(std::move(out), [a](Tape& t, const Tensor& g) {
            Tensor& ga = t.nodes_[a.id].grad;
            for (double& v : ga.data) v += g.data[0];
        });
    }

    Var scale(Var a, double c) {
        Tensor out = value(a);
        for (double& v : out.data) v *= c;
        return push(std::move(out), [a, c](Tape& t, const Tensor& g) {
            add_scaled(t.nodes_[a.id].grad, g, c);
        });
    }

    // Cosine similarity of two equal-shape tensors viewed as flat vectors;
    // 1x1 output in [-1, 1]. Norms are clamped from below so a collapsed
    // embedding yields similarity 0 with a finite gradient instead of NaN
    // (the evaluation-side cosine stays strict and rejects zero norms).
    Var cosine_similarity(Var a, Var b) {
        const Tensor& ta = value(a);
        const Tensor& tb = value(b);
        require_same_shape(ta, tb, "cosine_similarity");
        const double na = std::max(std::sqrt(dot_all(ta, ta)), 1e-12);
        const double nb = std::max(std::sqrt(dot_all(tb, tb)), 1e-12);
        const double ab = dot_all(ta, tb);
        const double s = ab / (na * nb);
        Tensor out(1, 1);
        out.data[0] = s;
        return push(std::move(out), [a, b, na, nb, s](Tape& t, const Tensor& g) {
            const Tensor& ta = t.nodes_[a.id].value;
            const Tensor& tb = t.nodes_[b.id].value;
            Tensor& ga = t.nodes_[a.id].grad;
            Tensor& gb = t.nodes_[b.id].grad;
            const double c = g.data[0];
            for (std::size_t i = 0; i < ta.data.size(); ++i) {
                ga.data[i] += c * (tb.data[i] / (na * nb) - s * ta.data[i] / (na * na));
                gb.data[i] += c * (ta.data[i] / (na * nb) - s * tb.data[i] / (nb * nb));
            }
        });
    }

    // Binary cross-entropy on a single logit against target in {0, 1};
    // numerically stable softplus form.
    Var sigmoid_bce(Var logit, double target) {
        const Tensor& tl = value(logit);
        if (tl.rows != 1 || tl.cols != 1) throw DimensionError("sigmoid_bce: logit must be 1x1, got " + tl.shape_str());
        if (target != 0.0 && target != 1.0) throw ValidationError("label out of range {0,1}");
        const double z = tl.data[0];
        Tensor out(1, 1);
        out.data[0] = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - target * z;
        return push(std::move(out), [logit, target](Tape& t, const Tensor& g) {
            const double z = t.nodes_[logit.id].value.data[0];
            const double sig = 1.0 / (1.0 + std::exp(-z));
            t.nodes_[logit.id].grad.data[0] += g.data[0] * (sig - target);
        });
    }

    // Seeds d(root) = 1 and propagates to every node created before it.
    void backward(Var root) {
        Tensor& g = nodes_[check(root)].grad;
        if (g.rows != 1 || g.cols != 1) throw DimensionError("backward: root must be a 1x1 scalar");
        g.data[0] += 1.0;
        for (int i = root.id; i >= 0; --i)
            if (nodes_[i].backward) nodes_[i].backward(*this, nodes_[i].grad);
    }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Tape&, const Tensor&)> backward;
    };

    static void scatter_edges(const Graph& g, const Tensor& src, Tensor& dst) {
        const int c = src.cols;
        for (auto [u, v] : g.edges()) {
            const double* su = src.row(u);
            const double* sv = src.row(v);
            double* du = dst.row(u);
            double* dv = dst.row(v);
            for (int j = 0; j < c; ++j) {
                dv[j] += su[j];
                du[j] += sv[j];
            }
        }
    }

    int check(Var v) const {
        if (!v.valid() || v.id >= static_cast<int>(nodes_.size())) throw ValidationError("Var: stale or invalid handle");
        return v.id;
    }

    Var push(Tensor value, std::function<void(Tape&, const Tensor&)> backward) {
        Node node;
        node.grad = Tensor(value.rows, value.cols);
        node.value = std::move(value);
        node.backward = std::move(backward);
        nodes_.push_back(std::move(node));
        return Var{static_cast<int>(nodes_.size()) - 1};
    }

    std::vector<Node> nodes_;
};

}  // namespace siri
