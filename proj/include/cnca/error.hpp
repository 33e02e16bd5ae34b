#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cnca {

/// Invalid parameters or configuration (bad generator spec, inconsistent config).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input data. Carries the 1-based line number when one applies.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Checkpoint container is unreadable, truncated or from another format version.
class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite loss or gradient encountered during optimisation.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cnca
