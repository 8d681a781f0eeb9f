#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "siri/errors.hpp"
#include "siri/tensor.hpp"

namespace siri {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

// Checkpoint format:
//   params <count>
//   <name> <rows> <cols>
//   <row-major values, one row per line, 17 significant digits>
// 17 digits round-trip IEEE doubles exactly.
inline void write_checkpoint(const NamedTensors& tensors, std::ostream& os) {
    os.precision(17);
    os << "params " << tensors.size() << '\n';
    for (const auto& [name, t] : tensors) {
        os << name << ' ' << t.rows << ' ' << t.cols << '\n';
        for (int i = 0; i < t.rows; ++i) {
            const double* row = t.row(i);
            for (int j = 0; j < t.cols; ++j) os << (j ? " " : "") << row[j];
            os << '\n';
        }
    }
}

inline void write_checkpoint(const NamedTensors& tensors, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    write_checkpoint(tensors, os);
}

inline NamedTensors read_checkpoint(std::istream& is, const std::string& origin = "<stream>") {
    int line_no = 0;
    std::string line;
    auto next_line = [&]() -> std::string& {
        if (!std::getline(is, line)) throw ParseError(line_no + 1, "unexpected end of file in " + origin);
        ++line_no;
        return line;
    };

    std::istringstream header(next_line());
    std::string magic;
    int count = 0;
    if (!(header >> magic >> count) || magic != "params" || count < 0)
        throw ParseError(line_no, "expected 'params <count>'");

    NamedTensors out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        std::istringstream th(next_line());
        std::string name;
        int rows = 0, cols = 0;
        if (!(th >> name >> rows >> cols) || rows < 0 || cols < 0)
            throw ParseError(line_no, "expected '<name> <rows> <cols>'");
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(rows) * cols);
        for (int i = 0; i < rows; ++i) {
            std::istringstream vs(next_line());
            for (int j = 0; j < cols; ++j) {
                double v = 0.0;
                if (!(vs >> v)) throw ParseError(line_no, "expected " + std::to_string(cols) + " values");
                values.push_back(v);
            }
        }
        try {
            out.emplace_back(name, Tensor::from_external(rows, cols, std::move(values), "checkpoint tensor " + name));
        } catch (const NumericError& err) {
            throw ParseError(line_no, err.what());
        }
    }
    return out;
}

inline NamedTensors read_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open: " + path);
    return read_checkpoint(is, path);
}

}  // namespace siri
