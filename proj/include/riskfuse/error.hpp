#pragma once

#include <stdexcept>
#include <string>

namespace riskfuse {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied arguments that violate a precondition (shape, range, emptiness).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A named entry (linguistic label, criterion code, attribute) is unknown.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable input data.
class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Base for failures of the numerics themselves.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Input is well formed but degenerate (all-zero matrix, zero denominators, ...).
class DegenerateInputError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Every rule firing strength underflowed to zero.
class DegenerateActivationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace riskfuse
