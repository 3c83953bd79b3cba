#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hom {

// Invalid parameters or configuration. The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input data (event files, config syntax). Exit code 2.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Not enough counts to form a ratio. Exit code 3.
class StatisticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hom
