#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

// Malformed input or a request outside an operation's domain. CLI exit 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A feasibility guard was exceeded. CLI exit 3.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, double bound)
        : std::runtime_error(what + " (bound " + std::to_string(bound) + ")"), bound_(bound) {}
    double bound() const { return bound_; }

private:
    double bound_;
};

// Backtracking found no admissible fill of the requested window.
class EmptyWindowError : public InputError {
public:
    using InputError::InputError;
};

// A dyadic tile level could not be decided inside the given window.
class UndeterminedError : public std::runtime_error {
public:
    UndeterminedError(const std::string& what, int level)
        : std::runtime_error(what), level_(level) {}
    int level() const { return level_; }

private:
    int level_;
};

// Power iteration ran out of iterations; carries the last Collatz-Wielandt enclosure.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}
    double lower() const { return lo_; }
    double upper() const { return hi_; }

private:
    double lo_, hi_;
};

}  // namespace thermo
