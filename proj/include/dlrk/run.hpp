#pragma once

#include "dlrk/config.hpp"

namespace dlrk {

enum class RunStatus : int {
    converged = 0,
    error = 1,
    not_converged = 2,
};

/// Execute the configured solve and write all requested output files into the
/// configured directory. Solver failures are recorded to error.txt and mapped
/// onto the returned status.
RunStatus run(const ProblemConfig& config);

/// Serialize a double with 17 significant digits (round-trip exact).
std::string format_float(double value);

}  // namespace dlrk
