// errors.hpp — exception hierarchy shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace usc {

// Root of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad inputs: parameters, configs, dimension mismatches.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Numerical failure detected at runtime (singular systems, ambiguous labels, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularSystemError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class LabelAmbiguityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoCrossingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateKernelError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace usc
