#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "siri/errors.hpp"
#include "siri/tape.hpp"
#include "siri/tensor.hpp"

namespace siri {

// A differentiable scalar function of a parameter list: build the computation
// on the given tape from the given leaves and return the scalar output.
using TapeFunction = std::function<Var(Tape&, const std::vector<Var>&)>;

// Compares the reverse-mode gradient of f against central finite differences
// (f(p+h) - f(p-h)) / 2h, componentwise. Returns the max relative error with
// denominator max(|analytic|, |numeric|, 1e-8).
inline double grad_check(const TapeFunction& f, const std::vector<Tensor>& params, double h) {
    if (h <= 0.0) throw ValidationError("h: must be > 0");

    auto eval = [&](const std::vector<Tensor>& p) {
        Tape tape;
        std::vector<Var> leaves;
        leaves.reserve(p.size());
        for (const Tensor& t : p) leaves.push_back(tape.leaf(t));
        Var out = f(tape, leaves);
        const Tensor& v = tape.value(out);
        if (v.rows != 1 || v.cols != 1) throw DimensionError("grad_check: f must return a 1x1 scalar");
        return v.data[0];
    };

    std::vector<Tensor> analytic;
    {
        Tape tape;
        std::vector<Var> leaves;
        leaves.reserve(params.size());
        for (const Tensor& t : params) leaves.push_back(tape.leaf(t));
        Var out = f(tape, leaves);
        tape.backward(out);
        for (Var leaf : leaves) analytic.push_back(tape.grad(leaf));
    }

    double max_rel_err = 0.0;
    std::vector<Tensor> probe = params;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (std::size_t i = 0; i < params[p].data.size(); ++i) {
            const double orig = probe[p].data[i];
            probe[p].data[i] = orig + h;
            const double fp = eval(probe);
            probe[p].data[i] = orig - h;
            const double fm = eval(probe);
            probe[p].data[i] = orig;
            const double numeric = (fp - fm) / (2.0 * h);
            const double a = analytic[p].data[i];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            max_rel_err = std::max(max_rel_err, std::abs(a - numeric) / denom);
        }
    }
    return max_rel_err;
}

}  // namespace siri
