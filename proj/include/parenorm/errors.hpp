#pragma once

#include <stdexcept>
#include <string>

namespace parenorm {

// Precondition violations: bad indices, values outside a required sector,
// points outside a chart's petal, malformed inputs.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Moebius evaluation at the pole of the transformation.
struct PoleError : DomainError {
    explicit PoleError(const std::string& what) : DomainError(what) {}
};

// An iteration or fit exhausted its budget without reaching tolerance.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A germ whose q-fold composition has no usable leading coefficient.
struct DegenerateGermError : std::runtime_error {
    explicit DegenerateGermError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace parenorm
