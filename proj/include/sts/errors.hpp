#pragma once

#include <stdexcept>
#include <string>

namespace sts {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the documented domain (e.g. blend time outside [0, t_f]).
struct DomainError : Error {
    using Error::Error;
};

// Task-space target has no joint-space solution within iteration budget.
struct UnreachableTargetError : Error {
    using Error::Error;
};

// Kinematic Jacobian is singular at the requested configuration.
struct SingularityError : Error {
    using Error::Error;
};

// Allocation box excludes the equality manifold at some grid sample.
struct AllocationInfeasibleError : Error {
    using Error::Error;
};

// An ODE solution exceeded its divergence guard (Riccati, Gramian, or state).
struct DivergenceError : Error {
    using Error::Error;
};

// Every weight candidate diverged; no argmin exists.
struct SearchFailedError : Error {
    using Error::Error;
};

// Two grids that must align do not.
struct GridMismatchError : Error {
    using Error::Error;
};

// Configuration file failed to parse or validate.
struct ConfigError : Error {
    using Error::Error;
};

// A pipeline stage is missing an artifact a prior stage should have written.
struct MissingArtifactError : Error {
    using Error::Error;
};

}  // namespace sts
