#pragma once

#include <stdexcept>
#include <string>

namespace slowfast {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A phase point (or a trajectory through it) left the admissible domain.
struct DomainError : Error {
    using Error::Error;
};

/// A numerical result is non-finite or violates a declared noise budget.
struct NumericsError : Error {
    using Error::Error;
};

/// The 2π-return of the reparametrized fast flow missed its base point.
struct ClosureError : Error {
    using Error::Error;
};

/// A tangent (variational) map became non-invertible.
struct SingularTangentError : Error {
    using Error::Error;
};

/// Period detection found no return within the allowed time window.
struct NoReturnError : Error {
    using Error::Error;
};

/// Rejection sampling failed to produce admissible points.
struct SamplingError : Error {
    using Error::Error;
};

/// An experiment configuration violates the schema.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace slowfast
