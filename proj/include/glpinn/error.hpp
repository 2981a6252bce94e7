#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glpinn {

/// Input rejected by a precondition check. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A requested combination that is well-formed but not implemented
/// (e.g. exact star discrepancy for d > 2, Sobol beyond the embedded table).
class UnsupportedError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A NaN or Inf showed up in a loss, residual or gradient.
class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& what, std::size_t index)
        : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace glpinn
