#pragma once

#include <stdexcept>
#include <string>

namespace spinramp {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not match.
struct ShapeError : Error {
    using Error::Error;
};

// An operator expected to be Hermitian is not (or an expectation value
// came out with too large an imaginary residue).
struct HermiticityError : Error {
    using Error::Error;
};

// Newton / fixed-point iteration failed to reach the requested residual.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual(residual) {}
    double residual;
};

// Linear solver inside the time stepper failed to reach its tolerance.
struct SolverError : Error {
    SolverError(const std::string& what, double residual)
        : Error(what), residual(residual) {}
    double residual;
};

// Ion chain is not a stable linear crystal (negative mode eigenvalue).
struct StabilityError : Error {
    using Error::Error;
};

// Raman beatnote sits on top of a phonon mode.
struct ResonanceError : Error {
    using Error::Error;
};

// Ground state at t=0 is degenerate; the polarizing field must lift it.
struct DegeneracyError : Error {
    using Error::Error;
};

// A cross-check between two routes to the same quantity failed.
struct ConsistencyError : Error {
    using Error::Error;
};

// Requested computation exceeds a hard capability limit (dimension cap).
struct CapabilityError : Error {
    using Error::Error;
};

// Input outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Not enough samples for a spectral estimate.
struct InsufficientDataError : Error {
    using Error::Error;
};

// Bad configuration file or override.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace spinramp
