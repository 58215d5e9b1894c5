#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace parscale {

/// Base class of every error thrown by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An inverse scaling formula was evaluated at N = 1, where it divides by N-1.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A measurement lies outside what the requested model can represent
/// (thrown only where a flagged value cannot be returned instead).
class OutOfModelError : public Error {
public:
    using Error::Error;
};

/// Input data is unusable: missing baseline, too few valid points.
class DataError : public Error {
public:
    using Error::Error;
};

/// A least-squares fit is degenerate or did not converge.
class FitError : public Error {
public:
    explicit FitError(const std::string& what,
                      double best_residual = std::nan(""))
        : Error(what), best_residual_(best_residual) {}

    /// Best residual reached before giving up (NaN for degenerate input).
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// Malformed CSV/config input; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace parscale
