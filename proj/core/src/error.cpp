#include "sie/error.hpp"

namespace sie {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_interval: return "invalid-interval";
        case ErrorKind::invalid_steps: return "invalid-steps";
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::shape_mismatch: return "shape-mismatch";
        case ErrorKind::node_mismatch: return "node-mismatch";
        case ErrorKind::non_finite_input: return "non-finite-input";
        case ErrorKind::numeric_failure: return "numeric-failure";
        case ErrorKind::empty_ensemble: return "empty-ensemble";
        case ErrorKind::parse_error: return "parse-error";
        case ErrorKind::format_error: return "format-error";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

NumericFailure::NumericFailure(std::size_t path, std::size_t index, const std::string& context)
    : Error(ErrorKind::numeric_failure,
            context + " produced a non-finite value at path " + std::to_string(path) + ", index " +
                std::to_string(index)),
      path_(path),
      index_(index) {}

}  // namespace sie
