#pragma once

#include <stdexcept>
#include <string>

namespace blkit {

// Invalid user-facing configuration or precondition violation (CLI exit 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A solver failed numerically (CLI exit 3).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double condition_estimate = 0.0)
        : std::runtime_error(what), condition_estimate(condition_estimate) {}
    double condition_estimate;
};

// Implicit x-march failed to converge; carries the failing x-node index.
class MarchingError : public NumericalError {
public:
    MarchingError(const std::string& what, std::size_t x_index)
        : NumericalError(what), x_index(x_index) {}
    std::size_t x_index;
};

// The computed base flow violates the positive-shear lower bound.
class OleinikViolation : public NumericalError {
public:
    explicit OleinikViolation(const std::string& what) : NumericalError(what) {}
};

// Data fail a compatibility requirement (corner or integral condition).
class CompatibilityError : public NumericalError {
public:
    explicit CompatibilityError(const std::string& what) : NumericalError(what) {}
};

// A stage was invoked before one of its prerequisites was built.
class DependencyError : public std::runtime_error {
public:
    explicit DependencyError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace blkit
