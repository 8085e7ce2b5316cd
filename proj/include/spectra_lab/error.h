#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spectra_lab {

// Input errors are caused by data or configuration; numerical errors by the
// pipeline itself. The CLI maps them to exit statuses 2 and 1.
enum class ErrorKind { input, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t line)
        : InputError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A parameter outside the domain of an operation (Q < 1, rho >= 1, tau not on the grid, ...).
class DomainError : public InputError {
public:
    using InputError::InputError;
};

/// Zero-variance series or a rank-deficient panel.
class DegenerateError : public InputError {
public:
    using InputError::InputError;
};

/// Panel shape problems: empty grid intersection, T <= N.
class DimensionError : public InputError {
public:
    using InputError::InputError;
};

/// Inconsistent group definition (overlapping or gapped membership chain).
class SpecificationError : public InputError {
public:
    using InputError::InputError;
};

/// A group references data that is not there.
class CoverageError : public InputError {
public:
    using InputError::InputError;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

} // namespace spectra_lab
