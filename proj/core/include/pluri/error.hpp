#pragma once

#include <stdexcept>
#include <string>

namespace pluri {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition (bad dimension, bad radius, mismatched grids, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// An iterative scheme hit its sweep budget or a stabilization test failed.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Input that is well formed but outside what the discrete model represents,
// e.g. a non-psh function handed to ma_measure.
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed scenario file; carries the offending field path.
class SchemaError : public Error {
public:
    SchemaError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace pluri
