#pragma once

#include <vector>

#include "dlrk/error.hpp"

namespace dlrk {

/// Per-iteration record of a power iteration run.
struct ConvergenceHistory {
    std::vector<double> k_estimates;
    std::vector<double> deltas;        // |k_{n+1} - k_n|
    std::vector<int> ranks;
    std::vector<double> wall_seconds;  // per-iteration wall time
    int iterations = 0;
    bool converged = false;

    void record(double k, double delta, int rank, double seconds) {
        k_estimates.push_back(k);
        deltas.push_back(delta);
        ranks.push_back(rank);
        wall_seconds.push_back(seconds);
        ++iterations;
    }
};

/// Raised when an iteration hits its step limit; carries what was computed.
struct NonConvergenceError : Error {
    ConvergenceHistory history;
    double k_last = 0.0;

    NonConvergenceError(const std::string& msg, ConvergenceHistory hist, double k)
        : Error(msg), history(std::move(hist)), k_last(k) {}
};

}  // namespace dlrk
