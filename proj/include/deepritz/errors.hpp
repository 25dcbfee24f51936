#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deepritz {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or mismatched dimensions.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite value encountered; `stage()` names where it happened.
class NumericError : public Error {
public:
    NumericError(std::string stage, const std::string& what)
        : Error(what + " [stage: " + stage + "]"), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Malformed document. Line/column are 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(format(what, line, column)), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed document whose contents are inconsistent.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a closed-form function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input too close to zero for a ratio diagnostic.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Training objective exploded or became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, double value)
        : Error("training diverged at step " + std::to_string(step) +
                " (objective " + std::to_string(value) + ")"),
          step_(step), value_(value) {}
    std::size_t step() const noexcept { return step_; }
    double value() const noexcept { return value_; }

private:
    std::size_t step_;
    double value_;
};

}  // namespace deepritz
