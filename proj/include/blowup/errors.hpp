#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

// Every library failure derives from Error. The CLI maps InputError
// subclasses to exit code 1 and NumericalError subclasses to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

class ValidationError : public InputError {
public:
    using InputError::InputError;
};

// A requested integral does not converge (e.g. n + m - 1 >= 2k).
class Divergent : public InputError {
public:
    using InputError::InputError;
};

class NonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularFit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoSignChange : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MultipleRoots : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// The leading-order reduced energy has no positive-d critical point.
class RegimeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace blowup
