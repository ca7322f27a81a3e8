#pragma once

#include <stdexcept>
#include <string>

namespace rissynth {

// Violated precondition on a value (out-of-range level, empty beam list, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed or invalid experiment configuration. line() is 0 when the
// problem is not tied to a specific line (e.g. a cross-field constraint).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string &message, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line)
    {
    }

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace rissynth
