#pragma once

#include <stdexcept>
#include <string>

namespace popeq {

// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Data that is valid but carries no information for the statistic
// (e.g. zero sum of squared deviations).
class DegenerateDataError : public DomainError {
public:
    explicit DegenerateDataError(const std::string& what) : DomainError(what) {}
};

// An iterative routine failed to converge.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Scenario or CLI configuration that is inconsistent.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A generated record broke a probability invariant.
class InvariantViolation : public std::runtime_error {
public:
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; the message names the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

}  // namespace popeq
