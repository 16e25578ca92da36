#pragma once

#include <stdexcept>
#include <string>

namespace ezmfg {

// base for every error thrown by the suite
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssumptionViolation : Error {
    AssumptionViolation(const std::string& field, const std::string& reason)
        : Error("assumption violated [" + field + "]: " + reason) {}
};

struct DomainError : Error {
    using Error::Error;
};

struct BadGrid : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    NoConvergence(int iters, double res)
        : Error("solver did not converge after " + std::to_string(iters) +
                " iterations, residual " + std::to_string(res)),
          iterations(iters),
          residual(res) {}
    int iterations;
    double residual;
};

struct NoCrossing : Error {
    using Error::Error;
};

struct NegativeDensity : Error {
    using Error::Error;
};

struct SingularSolve : Error {
    using Error::Error;
};

struct NoBracket : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct WindowTooSmall : Error {
    using Error::Error;
};

struct FitFailure : Error {
    using Error::Error;
};

}  // namespace ezmfg
