#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace caloric {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or invariant (bad data, bad arguments).
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public ValidationError {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : ValidationError("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                          std::to_string(got)) {}
    explicit DimensionMismatch(const std::string& what) : ValidationError(what) {}
};

class SyntaxError : public ValidationError {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : ValidationError(what + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class NonPositiveSpan : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class Inconsistent : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DuplicateTimes : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class TimeOutOfRange : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NotCaloric : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SupportTouchesBoundary : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NotAnEdge : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class BallTruncated : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ZeroDenominator : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A result the theory guarantees failed to materialise (e.g. an unsolvable layer in the Poisson recursion).
class InternalInconsistency : public Error {
public:
    using Error::Error;
};

/// Floating-point eigen-solve did not meet its residual tolerance.
class SpectralFailure : public Error {
public:
    using Error::Error;
};

}  // namespace caloric
