#pragma once

#include <stdexcept>
#include <string>

namespace revlab {

// Thrown when a computation cannot continue (integration underflow, solver
// failure, tolerance blow-up).  The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on malformed configuration / invalid arguments.  Exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace revlab
