#ifndef FLOODBAYES_ERRORS_HPP
#define FLOODBAYES_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace floodbayes {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates an invariant (bad value, broken ordering, misalignment).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. line is 1-based; 0 when not tied to a line.
class FormatError : public ValidationError {
public:
    explicit FormatError(const std::string& msg, std::size_t line = 0)
        : ValidationError(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Numerical failure: non-convergence, degenerate posterior, chain start failure.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace floodbayes

#endif
