#pragma once

#include <stdexcept>
#include <string>

namespace refugia {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: parameters, options, configuration. Maps to CLI exit 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failures. Maps to CLI exit 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoHopfError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NewtonDivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateNormalizationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonFiniteStateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NegativeStateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace refugia
