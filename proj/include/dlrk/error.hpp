#pragma once

#include <stdexcept>
#include <string>

namespace dlrk {

/// Base class for all errors raised by the solver library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user input: config files, geometry, material data.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Inconsistent dimensions or invalid state during operator assembly.
struct AssemblyError : Error {
    explicit AssemblyError(const std::string& msg) : Error(msg) {}
};

/// Linear-solver failures: singular systems, residuals out of tolerance.
struct SolverError : Error {
    explicit SolverError(const std::string& msg) : Error(msg) {}
};

/// Problem has no usable fission source (zero fission everywhere).
struct DegenerateProblemError : SolverError {
    explicit DegenerateProblemError(const std::string& msg) : SolverError(msg) {}
};

/// A caller violated an interface contract (e.g. non-orthonormal basis).
struct ContractViolationError : Error {
    explicit ContractViolationError(const std::string& msg) : Error(msg) {}
};

/// Rate measurement could not be performed (too few usable points).
struct MeasurementError : Error {
    explicit MeasurementError(const std::string& msg) : Error(msg) {}
};

}  // namespace dlrk
