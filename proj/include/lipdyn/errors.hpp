#pragma once

#include <stdexcept>
#include <string>

namespace lipdyn {

// Bad user input: malformed specs, schema violations, degenerate trees.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Precondition of an operation violated (caller bug, not input syntax).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// A query escaped the materialized / evaluable region. Carries the depth
// (or column count) that would have been needed so callers can re-run.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, long long required)
        : std::runtime_error(what + " (required: " + std::to_string(required) + ")"),
          required_(required) {}
    long long required() const noexcept { return required_; }

private:
    long long required_;
};

// Exact mode was asked for a value that is not rational (e.g. |3+i|).
class InexactValueError : public std::runtime_error {
public:
    explicit InexactValueError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lipdyn
