#pragma once

#include <stdexcept>
#include <string>

namespace bicwave {

/// A physical precondition was violated (E below threshold, bad parameters).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Evaluation requested at (or too close to) a branch point of the continuation.
struct BranchPointError : DomainError {
    using DomainError::DomainError;
};

/// Adaptive quadrature could not reach the requested tolerance.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigensolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wave-catalog counts or assignments violate the classification invariants.
struct ClassificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An amplitude vector has no definite mirror parity within tolerance.
struct ParityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Field-grid constraints violated (emitters not grid-aligned).
struct GridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Discretized problem exceeds the supported size.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

/// No eigenstate matched the search window.
struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace bicwave
