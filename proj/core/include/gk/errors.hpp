#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gk {

// Base of everything the library throws on a contract violation.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidLattice : public Error {
public:
    using Error::Error;
};

// An argument outside the mathematical domain of an operation
// (densities outside [0,1], bad cell index, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class InvalidUnits : public Error {
public:
    using Error::Error;
};

// Inconsistent model configuration: weight sums, profile lengths, etc.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

// Raised when the time step violates dt < 1/(1 + 2*eta_bar).
class StabilityError : public Error {
public:
    using Error::Error;
};

// Boundary data not admissible at the queried time.
class BoundaryError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual, std::size_t steps)
        : Error(what), residual_(residual), steps_(steps) {}

    double residual() const noexcept { return residual_; }
    std::size_t steps() const noexcept { return steps_; }

private:
    double residual_;
    std::size_t steps_;
};

}  // namespace gk
