#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dlrk/history.hpp"
#include "dlrk/operators.hpp"

namespace dlrk {

/// Rank-r factorization phi ~ X S W^T with orthonormal X and W.
struct LowRankState {
    Eigen::MatrixXd x_basis;  // N_x x r
    Eigen::MatrixXd coeff;    // r x r (not necessarily diagonal)
    Eigen::MatrixXd w_basis;  // G x r

    int rank() const { return static_cast<int>(coeff.rows()); }
    Eigen::MatrixXd reconstruct() const { return x_basis * coeff * w_basis.transpose(); }
};

/// Energy-side coefficient matrices congruence-projected by a W basis.
struct EnergyProjections {
    std::vector<Eigen::MatrixXd> sigma_f_hat;  // per material, W^T SigmaF W
    std::vector<Eigen::MatrixXd> m_hat;        // per pair, W^T M W
    std::vector<Eigen::MatrixXd> sigma_hat;    // per material, W^T Sigma W
};

/// Space-side coefficient matrices congruence-projected by an X basis.
struct SpaceProjections {
    std::vector<Eigen::MatrixXd> rho_hat;  // per material, X^T rho X
    std::vector<Eigen::MatrixXd> d_hat;    // per pair, X^T D X
};

EnergyProjections project_energy(const OperatorSet& ops, const Eigen::MatrixXd& w);
SpaceProjections project_space(const OperatorSet& ops, const Eigen::MatrixXd& x);

struct KStepResult {
    Eigen::MatrixXd x_new;  // orthonormal columns
    Eigen::MatrixXd n_x;    // x_new^T x_old
};

struct LStepResult {
    Eigen::MatrixXd w_new;  // orthonormal columns
    Eigen::MatrixXd n_e;    // w_new^T w_old
};

/// Solve the spatial update with the energy coefficients frozen in the
/// current W basis, then orthonormalize.
KStepResult k_step(const OperatorSet& ops, const LowRankState& state,
                   const EnergyProjections& energy_hats);

/// Solve the energy update with the spatial coefficients frozen in the
/// current X basis. The unknown is handled transposed (G x r), so the
/// energy matrices enter transposed and the spatial hats act from the right.
LStepResult l_step(const OperatorSet& ops, const LowRankState& state,
                   const SpaceProjections& space_hats);

/// Galerkin coefficient update with both bases advanced: all projections are
/// evaluated at (x_new, w_new); s_init must already be mixed as n_x S n_e^T.
/// Returns the unnormalized coefficient matrix.
Eigen::MatrixXd s_step(const OperatorSet& ops, const Eigen::MatrixXd& x_new,
                       const Eigen::MatrixXd& w_new, const Eigen::MatrixXd& s_init);

/// Pick the smallest rank whose discarded singular-value tail has Frobenius
/// norm at most theta, clamped to [r_min, r_max]. Returns the leading
/// singular triplets of s_hat.
struct TruncationResult {
    Eigen::MatrixXd p1;      // left singular vectors, 2r x r1
    Eigen::VectorXd sigma1;  // leading singular values
    Eigen::MatrixXd q1;      // right singular vectors, 2r x r1
    int rank = 0;
};
TruncationResult truncate(const Eigen::MatrixXd& s_hat, double theta, int r_min, int r_max);

struct DlraOptions {
    double eps = 1e-6;
    int max_iter = 10000;
};

struct AdaptiveOptions {
    double eps = 1e-6;
    int max_iter = 10000;
    double theta = 1e-6;        // truncation tolerance
    bool theta_relative = true; // interpret theta relative to ||S~||_F
    int r_min = 2;
    int r_max = 0;              // 0: min(N_x, G)
};

struct DlraSolveResult {
    double k_eff = 0.0;
    LowRankState state;
    ConvergenceHistory history;
};

struct DlraNonConvergence : NonConvergenceError {
    LowRankState state;
    DlraNonConvergence(const std::string& msg, ConvergenceHistory hist, double k,
                       LowRankState st)
        : NonConvergenceError(msg, std::move(hist), k), state(std::move(st)) {}
};

/// Deterministic start: first spatial basis column constant, first energy
/// basis column the emission spectrum of the first fissile material, the rest
/// a seeded orthonormal completion; S starts as I/sqrt(r).
LowRankState make_seed_state(const OperatorSet& ops, int rank, std::uint64_t seed);

/// Fixed-rank low-rank inverse power iteration (K-step, L-step, S-step per
/// outer iteration, k measured on the unnormalized coefficient matrix).
DlraSolveResult dlra_power_iteration(const OperatorSet& ops, const LowRankState& init,
                                     const DlraOptions& options = {});

/// Rank-adaptive variant: bases are augmented with their previous iterates
/// before the S-step, then truncated by singular-value tail.
DlraSolveResult dlra_power_iteration_adaptive(const OperatorSet& ops, const LowRankState& init,
                                              const AdaptiveOptions& options = {});

/// Entry counts behind the memory comparison: the factored solution and the
/// three vectorized systems built each outer iteration.
std::uint64_t dlra_solution_entries(int n_x, int g, int r);
std::uint64_t dlra_system_entries_per_step(int n_x, int g, int r);

}  // namespace dlrk
