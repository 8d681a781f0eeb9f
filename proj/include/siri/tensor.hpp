#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "siri/errors.hpp"

namespace siri {

// Dense row-major matrix of 64-bit reals. Vectors are 1xN or Nx1.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
    Tensor(int r, int c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
        if (data.size() != static_cast<std::size_t>(r) * c)
            throw DimensionError("Tensor: data length does not match " + std::to_string(r) + "x" + std::to_string(c));
    }

    static Tensor zeros(int r, int c) { return Tensor(r, c); }

    static Tensor filled(int r, int c, double v) {
        Tensor t(r, c);
        std::fill(t.data.begin(), t.data.end(), v);
        return t;
    }

    static Tensor ones(int r, int c) { return filled(r, c, 1.0); }

    // Entry point for values that arrive from external input: rejects NaN/Inf.
    static Tensor from_external(int r, int c, std::vector<double> values, const std::string& context) {
        for (double v : values)
            if (!std::isfinite(v)) throw NumericError(context + ": non-finite value");
        return Tensor(r, c, std::move(values));
    }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
    std::string shape_str() const { return std::to_string(rows) + "x" + std::to_string(cols); }

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
    double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }

    void set_zero() { std::fill(data.begin(), data.end(), 0.0); }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

// out = a * b
inline void matmul_into(const Tensor& a, const Tensor& b, Tensor& out) {
    out.rows = a.rows;
    out.cols = b.cols;
    out.data.assign(static_cast<std::size_t>(a.rows) * b.cols, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (int k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols != b.rows)
        throw DimensionError("matmul: inner dimensions " + a.shape_str() + " vs " + b.shape_str());
    Tensor out;
    matmul_into(a, b, out);
    return out;
}

// out += a * b^T
inline void matmul_nt_accum(const Tensor& a, const Tensor& b, Tensor& out) {
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (int j = 0; j < b.rows; ++j) {
            const double* brow = b.row(j);
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            orow[j] += acc;
        }
    }
}

// out += a^T * b
inline void matmul_tn_accum(const Tensor& a, const Tensor& b, Tensor& out) {
    for (int k = 0; k < a.rows; ++k) {
        const double* arow = a.row(k);
        const double* brow = b.row(k);
        for (int i = 0; i < a.cols; ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* orow = out.row(i);
            for (int j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
        }
    }
}

inline void add_scaled(Tensor& dst, const Tensor& src, double scale) {
    require_same_shape(dst, src, "add_scaled");
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += scale * src.data[i];
}

inline double dot_all(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot_all");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
    return acc;
}

}  // namespace siri
