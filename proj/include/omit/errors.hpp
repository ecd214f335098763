#pragma once

#include <stdexcept>
#include <string>

namespace omit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class UnsupportedTopology : public Error {
public:
    using Error::Error;
};

class RegimeViolation : public Error {
public:
    using Error::Error;
};

// Group delay requested where the phase is undefined or the stencil does not fit.
class DegeneratePoint : public Error {
public:
    using Error::Error;
};

class NumericalSingularity : public Error {
public:
    using Error::Error;
};

class NonConvergent : public Error {
public:
    NonConvergent(const std::string& what, double best_residual)
        : Error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

class InstabilityError : public Error {
public:
    using Error::Error;
};

// Config parse/validation failure. line() is 0 when the error is not tied to a line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0, std::string key = {})
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line), key_(std::move(key)) {}
    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

} // namespace omit
