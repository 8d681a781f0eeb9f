#pragma once

#include <cmath>
#include <vector>

#include "siri/errors.hpp"
#include "siri/tensor.hpp"

namespace siri {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Standard bias-corrected Adam over a flat list of parameter tensors.
class AdamState {
public:
    AdamState() = default;
    explicit AdamState(AdamConfig cfg) : cfg_(cfg) {}

    const AdamConfig& config() const { return cfg_; }
    long step_count() const { return step_; }

    void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
        if (params.size() != grads.size()) throw DimensionError("adam_step: params/grads count mismatch");
        if (m_.empty()) {
            for (const Tensor* p : params) {
                m_.emplace_back(p->rows, p->cols);
                v_.emplace_back(p->rows, p->cols);
            }
        }
        if (m_.size() != params.size()) throw DimensionError("adam_step: parameter count changed");
        ++step_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
        for (std::size_t p = 0; p < params.size(); ++p) {
            Tensor& x = *params[p];
            const Tensor& g = *grads[p];
            require_same_shape(x, g, "adam_step");
            require_same_shape(x, m_[p], "adam_step");
            for (std::size_t i = 0; i < x.data.size(); ++i) {
                double& m = m_[p].data[i];
                double& v = v_[p].data[i];
                const double gi = g.data[i];
                m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * gi;
                v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * gi * gi;
                const double m_hat = m / bc1;
                const double v_hat = v / bc2;
                x.data[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
            }
        }
    }

private:
    AdamConfig cfg_;
    long step_ = 0;
    std::vector<Tensor> m_, v_;
};

}  // namespace siri
