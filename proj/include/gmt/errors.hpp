#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gmt {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the expression parser. Carries the byte offset into the
/// source where the problem was detected.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset)
        : Error(message + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Raised when evaluation hits a mathematical domain violation
/// (log of a non-positive value, division by zero, ...). Carries the
/// printed form of the offending subexpression.
class EvalError : public Error {
public:
    EvalError(const std::string& message, std::string subexpression)
        : Error(message + " in '" + subexpression + "'"),
          subexpression_(std::move(subexpression)) {}

    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

/// Raised when an iterative scheme exhausts its refinement budget
/// before meeting its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Raised when a chart fails the immersion (full column rank) check
/// at an evaluation point.
class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

/// Raised when a level-set slice passes too close to a critical point
/// of the implicit function.
class CriticalSliceError : public Error {
public:
    CriticalSliceError(const std::string& message, double t)
        : Error(message), t_(t) {}

    double t() const noexcept { return t_; }

private:
    double t_;
};

/// Raised when the total t-measure of critical slices excluded from a
/// coarea check exceeds the tolerated budget.
class ExcludedSliceBudgetError : public Error {
public:
    using Error::Error;
};

/// Raised on violated call preconditions and broken structural
/// invariants (non-monotone data fed to a monotone limit, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace gmt
