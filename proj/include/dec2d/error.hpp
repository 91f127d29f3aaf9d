#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dec2d {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a data invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Degenerate or wrongly oriented triangle.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// System has no unique solution (no Dirichlet nodes, zero pivot).
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Non-finite values appeared during an iterative solve.
class NumericalBreakdown : public Error {
public:
    using Error::Error;
};

/// Bad command line or generator spec.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace dec2d
