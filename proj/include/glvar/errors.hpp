#pragma once

#include <stdexcept>
#include <string>

namespace glvar {

// Invalid user input: grid geometry, field preconditions, config files.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver breakdowns: non-convergent linear solves and similar.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace glvar
