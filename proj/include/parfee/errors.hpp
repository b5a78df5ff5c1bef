#pragma once

#include <stdexcept>
#include <string>

namespace parfee {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument values (negative fees, malformed grids, bad tolerances).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A curve violates the shape contract required by its role.
class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Evaluation outside the domain of a curve or operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation at (or too close to) the non-differentiable regime switch.
class KinkError : public Error {
public:
    using Error::Error;
};

/// Root bracket without a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

/// The regime function does not switch inside the requested bracket.
class NoRootError : public BracketError {
public:
    using BracketError::BracketError;
};

/// Iterative method ran out of iterations or missed its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Scenario file problems. The message starts with the offending key path.
class ConfigError : public Error {
public:
    ConfigError(std::string key_path, const std::string& what)
        : Error(key_path.empty() ? what : key_path + ": " + what), key_path_(std::move(key_path)) {}

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace parfee
