#pragma once

#include <stdexcept>

namespace mpsrg {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, domain violation, size cap, bad flags.
struct InvalidInput : Error {
    using Error::Error;
};

/// An iterative method failed to converge or a computation degenerated.
struct NumericalError : Error {
    using Error::Error;
};

/// A flow or power limit has no stationary point (periodic / unimodular phases).
struct NonConvergentError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace mpsrg
