#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spread {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfRangeError : public Error {
public:
    using Error::Error;
};

class MissingNodeError : public Error {
public:
    using Error::Error;
};

class InsufficientDepthError : public Error {
public:
    using Error::Error;
};

/// A node or population cap was exceeded.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, std::size_t cap, std::size_t reached)
        : Error(what), cap_(cap), reached_(reached) {}
    std::size_t cap() const noexcept { return cap_; }
    /// Partial count or generation reached when the cap tripped.
    std::size_t reached() const noexcept { return reached_; }

private:
    std::size_t cap_;
    std::size_t reached_;
};

/// A block code has no image for a pattern it was asked to label.
class CoverageError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> violations)
        : Error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Matrix is not irreducible; carries the strongly connected components.
class StructureError : public Error {
public:
    StructureError(const std::string& what, std::vector<std::vector<std::size_t>> components)
        : Error(what), components_(std::move(components)) {}
    const std::vector<std::vector<std::size_t>>& components() const noexcept { return components_; }

private:
    std::vector<std::vector<std::size_t>> components_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Branching process is not supercritical (rho <= 1).
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Monte Carlo estimate impossible, e.g. every trial went extinct.
class EstimationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(what), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace spread
