#pragma once

#include <optional>

#include <Eigen/Core>

#include "dlrk/history.hpp"
#include "dlrk/kron_solve.hpp"
#include "dlrk/operators.hpp"

namespace dlrk {

struct PowerOptions {
    double eps = 1e-6;     // stop when |k_{n+1} - k_n| <= eps
    int max_iter = 10000;
};

struct FullSolveResult {
    double k_eff = 0.0;
    Eigen::MatrixXd phi;  // normalized, N_x x G
    ConvergenceHistory history;
};

struct FullNonConvergence : NonConvergenceError {
    Eigen::MatrixXd phi;
    FullNonConvergence(const std::string& msg, ConvergenceHistory hist, double k,
                       Eigen::MatrixXd flux)
        : NonConvergenceError(msg, std::move(hist), k), phi(std::move(flux)) {}
};

/// The loss side of the iteration as a multi-term system on N_x x G fluxes.
MultiTermSystem build_loss_system(const OperatorSet& ops);

/// Dense inverse power iteration: solve the loss system against the fission
/// source of the previous iterate, normalize in the Frobenius norm, and track
/// k through the norm of the unnormalized update. The loss factorization is
/// built once and reused across iterations.
FullSolveResult full_power_iteration(const OperatorSet& ops, const PowerOptions& options = {},
                                     const std::optional<Eigen::MatrixXd>& init = {});

}  // namespace dlrk
