#pragma once

#include <stdexcept>
#include <string>

namespace fexp {

// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: parse errors, unknown generators, inconsistent degrees.
class InputError : public Error {
public:
    using Error::Error;
};

// A mathematical precondition of an operation does not hold
// (non-unimodular matrix, non-closed form, non-body point, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// An identity that must hold by construction failed. Always a bug.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace fexp
