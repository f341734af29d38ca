#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sie {

enum class ErrorKind {
    invalid_interval,
    invalid_steps,
    invalid_argument,
    shape_mismatch,
    node_mismatch,
    non_finite_input,
    numeric_failure,
    empty_ensemble,
    parse_error,
    format_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when a NaN or Inf shows up in a process; carries the first
/// offending (path, grid index) in path-major order.
class NumericFailure : public Error {
public:
    NumericFailure(std::size_t path, std::size_t index, const std::string& context);

    std::size_t path() const noexcept { return path_; }
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t path_;
    std::size_t index_;
};

}  // namespace sie
