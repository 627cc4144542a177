#pragma once

#include <stdexcept>
#include <string>

namespace safe {

// Base class for all library errors. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad distribution or type parameters (negative sd, probability outside [0,1], ...).
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

// Cholesky failure beyond the jitter retry; carries the 1-based leading minor.
class DecompositionError : public Error {
public:
    DecompositionError(const std::string& msg, int minor)
        : Error(msg), leading_minor(minor) {}
    int leading_minor;
};

// Bounded drawing could not fill the request; carries the empirical acceptance rate.
class TruncationInfeasibleError : public Error {
public:
    TruncationInfeasibleError(const std::string& msg, double rate)
        : Error(msg), acceptance_rate(rate) {}
    double acceptance_rate;
};

// Effect-size formula undefined on the given inputs (e.g. non-positive mean for a log).
class DomainError : public Error {
public:
    using Error::Error;
};

// Paired design with unequal group sizes, or similar design/input mismatch.
class DesignMismatchError : public Error {
public:
    using Error::Error;
};

// Requested combination the method does not define (e.g. order-2 dependent lnRoM).
class UnsupportedCombinationError : public Error {
public:
    using Error::Error;
};

// More than half of the replicates were rejected by the transform.
class ExcessRejectionError : public Error {
public:
    using Error::Error;
};

// Fewer than two valid replicates to summarise.
class DegenerateBatchError : public Error {
public:
    using Error::Error;
};

// Dataset column binding failed.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Non-numeric cell or malformed delimited input.
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace safe
