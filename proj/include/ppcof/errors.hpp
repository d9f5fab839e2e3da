#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ppcof {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// The all-zero coefficient vector was passed where a network equation is required.
class ZeroCoefficientError : public Error {
public:
    ZeroCoefficientError() : Error("coefficient vector a must be nonzero") {}
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Every candidate produced by a search quantized to zero.
class SearchFailureError : public Error {
public:
    using Error::Error;
};

class EnumerationTooLargeError : public Error {
public:
    EnumerationTooLargeError(const std::string& what, double estimate)
        : Error(what + " (estimated " + std::to_string(estimate) + " candidates)"), estimate_(estimate) {}

    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class InvalidFieldError : public Error {
public:
    using Error::Error;
};

class InvalidSymbolError : public Error {
public:
    using Error::Error;
};

class InvalidComparisonError : public Error {
public:
    using Error::Error;
};

/// Experiment or command-line configuration that cannot be run.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ppcof
