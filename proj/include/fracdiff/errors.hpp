#pragma once

#include <stdexcept>
#include <string>

namespace fracdiff {

/// Precondition or range violation in caller-supplied data.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Linear solve failed to meet its tolerance; `log` carries the iteration history.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::string log = {})
        : std::runtime_error(what), log_(std::move(log)) {}
    const std::string& log() const noexcept { return log_; }

private:
    std::string log_;
};

/// Malformed or truncated file / configuration text.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the regime where an evaluator is trustworthy.
class RegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace fracdiff
