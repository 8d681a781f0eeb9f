#pragma once

#include <stdexcept>
#include <string>

namespace siri {

// Invalid user-supplied parameter or config value; message names the field.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape incompatibility between tensors; message names the operation.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input exceeds a documented size limit.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Undefined numeric result (zero-norm cosine, non-finite input).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file content; carries the 1-based line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

}  // namespace siri
