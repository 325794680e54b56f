#include "dlrk/power_full.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace dlrk {

MultiTermSystem build_loss_system(const OperatorSet& ops) {
    MultiTermSystem sys;
    sys.n = ops.n_cells;
    sys.m = ops.n_groups;
    for (const auto& pair : ops.pairs) {
        sys.left_a.push_back(pair.stencil.to_dense());
        sys.right_b.push_back(Eigen::MatrixXd(pair.m_diag.asDiagonal()));
    }
    for (int l = 0; l < ops.n_materials; ++l) {
        sys.left_c.push_back(Eigen::MatrixXd(ops.rho[l].asDiagonal()));
        sys.right_d.push_back(ops.removal[l]);
    }
    return sys;
}

FullSolveResult full_power_iteration(const OperatorSet& ops, const PowerOptions& options,
                                     const std::optional<Eigen::MatrixXd>& init) {
    if (!(options.eps > 0.0))
        throw ConfigError("full_power_iteration: eps must be positive");

    Eigen::MatrixXd phi;
    if (init) {
        phi = *init;
        if (phi.rows() != ops.n_cells || phi.cols() != ops.n_groups)
            throw ConfigError("full_power_iteration: initial flux shape mismatch");
        if (phi.norm() == 0.0)
            throw ConfigError("full_power_iteration: initial flux is zero");
    } else {
        phi = Eigen::MatrixXd::Ones(ops.n_cells, ops.n_groups);
    }
    phi /= phi.norm();

    const VectorizedOperator loss(build_loss_system(ops));
    const int rank = std::min(ops.n_cells, ops.n_groups);

    FullSolveResult result;
    double k = 1.0;
    for (int n = 0; n < options.max_iter; ++n) {
        const auto start = std::chrono::steady_clock::now();
        const Eigen::MatrixXd update = loss.solve(apply_fission(ops, phi));
        const double k_next = update.norm();
        if (k_next == 0.0)
            throw DegenerateProblemError("full_power_iteration: fission source vanished");
        phi = update / k_next;
        const double delta = std::abs(k_next - k);
        k = k_next;
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.record(k, delta, rank, seconds);
        if (delta <= options.eps) {
            result.history.converged = true;
            break;
        }
    }
    if (!result.history.converged)
        throw FullNonConvergence("full_power_iteration: no convergence after " +
                                     std::to_string(options.max_iter) + " iterations",
                                 result.history, k, phi);
    result.k_eff = k;
    result.phi = phi;
    return result;
}

}  // namespace dlrk
