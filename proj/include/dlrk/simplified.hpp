#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dlrk/history.hpp"
#include "dlrk/power_dlra.hpp"

namespace dlrk {

/// Two-sided eigenproblem A phi B = lambda C phi D with known spectra of
/// C_hat = A^{-1} C and D_hat = D B^{-1}. The iteration's k converges to the
/// product of the two dominant eigenvalues.
struct TwoSidedProblem {
    Eigen::MatrixXd a, c;      // N x N
    Eigen::MatrixXd b, d;      // M x M
    Eigen::MatrixXd c_hat;     // A^{-1} C = V diag(lambda) V^{-1}
    Eigen::MatrixXd d_hat;     // D B^{-1} = U^{-1} diag(sigma) U
    Eigen::MatrixXd v_basis;   // V, unit columns
    Eigen::MatrixXd u_rows;    // U, unit rows
    Eigen::VectorXd known_lambda;
    Eigen::VectorXd known_sigma;
    Eigen::VectorXd v1;        // dominant right eigenvector of c_hat
    Eigen::VectorXd u1;        // dominant direction of d_hat's row structure

    Eigen::Index n() const { return c_hat.rows(); }
    Eigen::Index m() const { return d_hat.rows(); }
    double dominant_product() const { return known_lambda(0) * known_sigma(0); }
};

struct SpectraOptions {
    bool identity_similarity = false;  // V = I, U = I (diagonal problem)
};

/// Build a problem with the given eigenvalue lists (descending magnitude,
/// strictly dominant leading entry) through seeded well-conditioned
/// similarity transforms; A and B are identities.
TwoSidedProblem construct_from_spectra(const std::vector<double>& lambdas,
                                       const std::vector<double>& sigmas, std::uint64_t seed,
                                       const SpectraOptions& options = {});

struct TwoSidedResult {
    double k = 0.0;
    Eigen::MatrixXd phi;
    ConvergenceHistory history;
    std::vector<double> k_errors;  // |k_n - lambda_1 sigma_1|
};

TwoSidedResult full_two_sided_iteration(const TwoSidedProblem& problem, double eps,
                                        int max_iter,
                                        const Eigen::MatrixXd* init = nullptr);

struct TwoSidedDlraResult {
    double k = 0.0;
    LowRankState state;
    ConvergenceHistory history;
    std::vector<double> k_errors;
    std::vector<double> x_align_errors;  // min over columns and signs of ||X_i -+ v1||
    std::vector<double> w_align_errors;
};

/// Seeded rank-r start whose every basis column carries a nonzero component
/// of the dominant eigendirection, as the convergence theory requires.
LowRankState make_two_sided_init(const TwoSidedProblem& problem, int rank, std::uint64_t seed);

TwoSidedDlraResult dlra_two_sided_iteration(const TwoSidedProblem& problem,
                                            const LowRankState& init, double eps,
                                            int max_iter);

/// Least-squares slope of log(error) over the trailing window of up to 20
/// entries lying above a 1e-13 floor, exponentiated. Requires at least 10
/// usable entries.
double fit_geometric_rate(const std::vector<double>& errors);

}  // namespace dlrk
