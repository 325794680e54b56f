#include "dlrk/power_dlra.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "dlrk/kron_solve.hpp"
#include "dlrk/linalg.hpp"

namespace dlrk {

namespace {

constexpr double kBasisContractTol = 1e-8;
constexpr double kBasisInvariantTol = 1e-10;

void require_orthonormal(const Eigen::MatrixXd& basis, const char* which) {
    if (orthonormality_error(basis) > kBasisContractTol)
        throw ContractViolationError(std::string(which) +
                                     " basis does not have orthonormal columns");
}

Eigen::MatrixXd dense_diag(const Eigen::VectorXd& d) {
    return Eigen::MatrixXd(d.asDiagonal());
}

}  // namespace

EnergyProjections project_energy(const OperatorSet& ops, const Eigen::MatrixXd& w) {
    if (w.rows() != ops.n_groups)
        throw AssemblyError("project_energy: basis row count mismatch");
    require_orthonormal(w, "project_energy: W");
    EnergyProjections hats;
    for (int l = 0; l < ops.n_materials; ++l) {
        hats.sigma_f_hat.push_back(w.transpose() * ops.fission[l] * w);
        hats.sigma_hat.push_back(w.transpose() * ops.removal[l] * w);
    }
    for (const auto& pair : ops.pairs)
        hats.m_hat.push_back(w.transpose() * pair.m_diag.asDiagonal() * w);
    return hats;
}

SpaceProjections project_space(const OperatorSet& ops, const Eigen::MatrixXd& x) {
    if (x.rows() != ops.n_cells)
        throw AssemblyError("project_space: basis row count mismatch");
    require_orthonormal(x, "project_space: X");
    SpaceProjections hats;
    for (int l = 0; l < ops.n_materials; ++l)
        hats.rho_hat.push_back(x.transpose() * ops.rho[l].asDiagonal() * x);
    for (const auto& pair : ops.pairs)
        hats.d_hat.push_back(x.transpose() * pair.stencil.apply(x));
    return hats;
}

namespace {

/// Shared by the fixed-rank and adaptive drivers: solve the K-step system at
/// the current rank without orthonormalizing, so the caller can augment.
Eigen::MatrixXd k_step_solve(const OperatorSet& ops, const LowRankState& state,
                             const EnergyProjections& energy_hats) {
    const Eigen::MatrixXd k_old = state.x_basis * state.coeff;

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(k_old.rows(), k_old.cols());
    for (int l = 0; l < ops.n_materials; ++l)
        rhs.noalias() += ops.rho[l].asDiagonal() * (k_old * energy_hats.sigma_f_hat[l]);
    if (rhs.norm() == 0.0)
        throw DegenerateProblemError("k_step: projected fission source is zero, "
                                     "update would be rank deficient");

    MultiTermSystem sys;
    sys.n = ops.n_cells;
    sys.m = state.rank();
    for (std::size_t p = 0; p < ops.pairs.size(); ++p) {
        sys.left_a.push_back(ops.pairs[p].stencil.to_dense());
        sys.right_b.push_back(energy_hats.m_hat[p]);
    }
    for (int l = 0; l < ops.n_materials; ++l) {
        sys.left_c.push_back(dense_diag(ops.rho[l]));
        sys.right_d.push_back(energy_hats.sigma_hat[l]);
    }
    return VectorizedOperator(std::move(sys)).solve(rhs);
}

/// L-step solve for the transposed unknown L^T of shape G x r.
Eigen::MatrixXd l_step_solve(const OperatorSet& ops, const LowRankState& state,
                             const SpaceProjections& space_hats) {
    const Eigen::MatrixXd l_old_t = state.w_basis * state.coeff.transpose();

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(l_old_t.rows(), l_old_t.cols());
    for (int l = 0; l < ops.n_materials; ++l)
        rhs.noalias() += ops.fission[l].transpose() * l_old_t * space_hats.rho_hat[l].transpose();
    if (rhs.norm() == 0.0)
        throw DegenerateProblemError("l_step: projected fission source is zero, "
                                     "update would be rank deficient");

    MultiTermSystem sys;
    sys.n = ops.n_groups;
    sys.m = state.rank();
    for (std::size_t p = 0; p < ops.pairs.size(); ++p) {
        sys.left_a.push_back(dense_diag(ops.pairs[p].m_diag));
        sys.right_b.push_back(space_hats.d_hat[p].transpose());
    }
    for (int l = 0; l < ops.n_materials; ++l) {
        sys.left_c.push_back(ops.removal[l].transpose());
        sys.right_d.push_back(space_hats.rho_hat[l].transpose());
    }
    return VectorizedOperator(std::move(sys)).solve(rhs);
}

}  // namespace

KStepResult k_step(const OperatorSet& ops, const LowRankState& state,
                   const EnergyProjections& energy_hats) {
    const Eigen::MatrixXd k_new = k_step_solve(ops, state, energy_hats);
    KStepResult out;
    out.x_new = qr_positive(k_new).q;
    out.n_x = out.x_new.transpose() * state.x_basis;
    return out;
}

LStepResult l_step(const OperatorSet& ops, const LowRankState& state,
                   const SpaceProjections& space_hats) {
    const Eigen::MatrixXd l_new_t = l_step_solve(ops, state, space_hats);
    LStepResult out;
    out.w_new = qr_positive(l_new_t).q;
    out.n_e = out.w_new.transpose() * state.w_basis;
    return out;
}

Eigen::MatrixXd s_step(const OperatorSet& ops, const Eigen::MatrixXd& x_new,
                       const Eigen::MatrixXd& w_new, const Eigen::MatrixXd& s_init) {
    const EnergyProjections energy_hats = project_energy(ops, w_new);
    const SpaceProjections space_hats = project_space(ops, x_new);
    if (s_init.rows() != x_new.cols() || s_init.cols() != w_new.cols())
        throw AssemblyError("s_step: mixed coefficient matrix has the wrong shape");

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(s_init.rows(), s_init.cols());
    for (int l = 0; l < ops.n_materials; ++l)
        rhs.noalias() += space_hats.rho_hat[l] * s_init * energy_hats.sigma_f_hat[l];

    MultiTermSystem sys;
    sys.n = s_init.rows();
    sys.m = s_init.cols();
    for (std::size_t p = 0; p < ops.pairs.size(); ++p) {
        sys.left_a.push_back(space_hats.d_hat[p]);
        sys.right_b.push_back(energy_hats.m_hat[p]);
    }
    for (int l = 0; l < ops.n_materials; ++l) {
        sys.left_c.push_back(space_hats.rho_hat[l]);
        sys.right_d.push_back(energy_hats.sigma_hat[l]);
    }
    return VectorizedOperator(std::move(sys)).solve(rhs);
}

TruncationResult truncate(const Eigen::MatrixXd& s_hat, double theta, int r_min, int r_max) {
    if (theta < 0.0)
        throw ConfigError("truncate: theta must be nonnegative");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s_hat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const int n_sv = static_cast<int>(sigma.size());

    // tail(r) = sum of squared singular values discarded when keeping r
    int rank = n_sv;
    double tail_sq = 0.0;
    for (int r = n_sv; r >= 1; --r) {
        tail_sq += sigma(r - 1) * sigma(r - 1);
        if (std::sqrt(tail_sq) <= theta)
            rank = r - 1;
        else
            break;
    }
    const int hi = std::max(1, std::min(r_max, n_sv));
    const int lo = std::min(std::max(1, r_min), hi);
    rank = std::clamp(rank, lo, hi);

    TruncationResult out;
    out.rank = rank;
    out.p1 = svd.matrixU().leftCols(rank);
    out.sigma1 = sigma.head(rank);
    out.q1 = svd.matrixV().leftCols(rank);
    return out;
}

LowRankState make_seed_state(const OperatorSet& ops, int rank, std::uint64_t seed) {
    const int max_rank = std::min(ops.n_cells, ops.n_groups);
    if (rank < 1 || rank > max_rank)
        throw ConfigError("dlra: rank must lie in [1, " + std::to_string(max_rank) +
                          "], got " + std::to_string(rank));

    Eigen::VectorXd w_first = Eigen::VectorXd::Ones(ops.n_groups);
    for (int l = 0; l < ops.n_materials; ++l) {
        if (ops.fission[l].cwiseAbs().maxCoeff() > 0.0) {
            // fission stores nu_sigma_f * chi^T, so any nonzero row is chi
            Eigen::Index row = 0;
            ops.fission[l].rowwise().norm().maxCoeff(&row);
            w_first = ops.fission[l].row(row).transpose();
            break;
        }
    }

    std::mt19937_64 rng(seed);
    LowRankState state;
    state.x_basis = complete_orthonormal(Eigen::VectorXd::Ones(ops.n_cells), rank, rng);
    state.w_basis = complete_orthonormal(w_first, rank, rng);
    state.coeff = Eigen::MatrixXd::Identity(rank, rank) / std::sqrt(double(rank));
    return state;
}

namespace {

void validate_init(const OperatorSet& ops, const LowRankState& init) {
    const int max_rank = std::min(ops.n_cells, ops.n_groups);
    if (init.rank() < 1 || init.rank() > max_rank)
        throw ConfigError("dlra: initial rank out of range");
    if (init.x_basis.rows() != ops.n_cells || init.w_basis.rows() != ops.n_groups ||
        init.x_basis.cols() != init.rank() || init.w_basis.cols() != init.rank())
        throw ConfigError("dlra: initial state shape mismatch");
    require_orthonormal(init.x_basis, "dlra init: X");
    require_orthonormal(init.w_basis, "dlra init: W");
    if (init.coeff.norm() == 0.0)
        throw ConfigError("dlra: initial coefficient matrix is zero");
}

void check_invariants(const LowRankState& state) {
    if (orthonormality_error(state.x_basis) > kBasisInvariantTol ||
        orthonormality_error(state.w_basis) > kBasisInvariantTol)
        throw SolverError("dlra: basis lost orthonormality during iteration");
    if (std::abs(state.coeff.norm() - 1.0) > 1e-12)
        throw SolverError("dlra: coefficient matrix lost its normalization");
}

}  // namespace

DlraSolveResult dlra_power_iteration(const OperatorSet& ops, const LowRankState& init,
                                     const DlraOptions& options) {
    if (!(options.eps > 0.0))
        throw ConfigError("dlra: eps must be positive");
    validate_init(ops, init);

    LowRankState state = init;
    state.coeff /= state.coeff.norm();

    DlraSolveResult result;
    double k = 1.0;
    for (int n = 0; n < options.max_iter; ++n) {
        const auto start = std::chrono::steady_clock::now();

        const EnergyProjections energy_hats = project_energy(ops, state.w_basis);
        const SpaceProjections space_hats = project_space(ops, state.x_basis);
        const KStepResult ks = k_step(ops, state, energy_hats);
        const LStepResult ls = l_step(ops, state, space_hats);
        const Eigen::MatrixXd s_init = ks.n_x * state.coeff * ls.n_e.transpose();
        const Eigen::MatrixXd s_tilde = s_step(ops, ks.x_new, ls.w_new, s_init);

        const double k_next = s_tilde.norm();
        if (k_next == 0.0)
            throw DegenerateProblemError("dlra: coefficient update vanished");
        state.x_basis = ks.x_new;
        state.w_basis = ls.w_new;
        state.coeff = s_tilde / k_next;
        check_invariants(state);

        const double delta = std::abs(k_next - k);
        k = k_next;
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.record(k, delta, state.rank(), seconds);
        if (delta <= options.eps) {
            result.history.converged = true;
            break;
        }
    }
    if (!result.history.converged)
        throw DlraNonConvergence("dlra: no convergence after " +
                                     std::to_string(options.max_iter) + " iterations",
                                 result.history, k, state);
    result.k_eff = k;
    result.state = state;
    return result;
}

DlraSolveResult dlra_power_iteration_adaptive(const OperatorSet& ops, const LowRankState& init,
                                              const AdaptiveOptions& options) {
    if (!(options.eps > 0.0))
        throw ConfigError("dlra: eps must be positive");
    if (options.theta < 0.0)
        throw ConfigError("dlra: theta must be nonnegative");
    validate_init(ops, init);
    const int max_rank = std::min(ops.n_cells, ops.n_groups);
    const int r_max = options.r_max > 0 ? std::min(options.r_max, max_rank) : max_rank;
    const int r_min = std::max(1, options.r_min);
    if (r_min > r_max)
        throw ConfigError("dlra: r_min exceeds r_max");

    LowRankState state = init;
    state.coeff /= state.coeff.norm();

    DlraSolveResult result;
    double k = 1.0;
    for (int n = 0; n < options.max_iter; ++n) {
        const auto start = std::chrono::steady_clock::now();

        const EnergyProjections energy_hats = project_energy(ops, state.w_basis);
        const SpaceProjections space_hats = project_space(ops, state.x_basis);
        const Eigen::MatrixXd k_new = k_step_solve(ops, state, energy_hats);
        const Eigen::MatrixXd l_new_t = l_step_solve(ops, state, space_hats);

        // Augment both bases with their previous spans before orthonormalizing.
        const int r = state.rank();
        Eigen::MatrixXd x_aug(ops.n_cells, 2 * r);
        x_aug << k_new, state.x_basis;
        Eigen::MatrixXd w_aug(ops.n_groups, 2 * r);
        w_aug << l_new_t, state.w_basis;
        const Eigen::MatrixXd x_basis =
            qr_positive(x_aug).q.leftCols(std::min<int>(2 * r, ops.n_cells));
        const Eigen::MatrixXd w_basis =
            qr_positive(w_aug).q.leftCols(std::min<int>(2 * r, ops.n_groups));

        const Eigen::MatrixXd n_x = x_basis.transpose() * state.x_basis;
        const Eigen::MatrixXd n_e = w_basis.transpose() * state.w_basis;
        const Eigen::MatrixXd s_init = n_x * state.coeff * n_e.transpose();
        const Eigen::MatrixXd s_tilde = s_step(ops, x_basis, w_basis, s_init);

        const double s_norm = s_tilde.norm();
        if (s_norm == 0.0)
            throw DegenerateProblemError("dlra: coefficient update vanished");
        const double theta = options.theta_relative ? options.theta * s_norm : options.theta;
        const TruncationResult trunc = truncate(s_tilde, theta, r_min, r_max);

        state.x_basis = x_basis * trunc.p1;
        state.w_basis = w_basis * trunc.q1;
        const double k_next = trunc.sigma1.norm();
        state.coeff = Eigen::MatrixXd(trunc.sigma1.asDiagonal()) / k_next;
        check_invariants(state);

        const double delta = std::abs(k_next - k);
        k = k_next;
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.record(k, delta, state.rank(), seconds);
        if (delta <= options.eps) {
            result.history.converged = true;
            break;
        }
    }
    if (!result.history.converged)
        throw DlraNonConvergence("dlra adaptive: no convergence after " +
                                     std::to_string(options.max_iter) + " iterations",
                                 result.history, k, state);
    result.k_eff = k;
    result.state = state;
    return result;
}

std::uint64_t dlra_solution_entries(int n_x, int g, int r) {
    const auto nx = static_cast<std::uint64_t>(n_x);
    const auto gg = static_cast<std::uint64_t>(g);
    const auto rr = static_cast<std::uint64_t>(r);
    return nx * rr + gg * rr + rr * rr;
}

std::uint64_t dlra_system_entries_per_step(int n_x, int g, int r) {
    const auto nx = static_cast<std::uint64_t>(n_x);
    const auto gg = static_cast<std::uint64_t>(g);
    const auto rr = static_cast<std::uint64_t>(r);
    return rr * rr * nx * nx + rr * rr * gg * gg + rr * rr * rr * rr;
}

}  // namespace dlrk
