#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

namespace dlrk {

/// Multi-term matrix equation -sum_l A^(l) X B^(l) + sum_l C^(l) X D^(l) = Y
/// with X, Y of shape n x m. The A/B lists pair by index, as do C/D; the two
/// groups may have different lengths.
struct MultiTermSystem {
    std::vector<Eigen::MatrixXd> left_a;   // n x n, minus terms
    std::vector<Eigen::MatrixXd> right_b;  // m x m
    std::vector<Eigen::MatrixXd> left_c;   // n x n, plus terms
    std::vector<Eigen::MatrixXd> right_d;  // m x m
    Eigen::Index n = 0;
    Eigen::Index m = 0;

    void validate() const;
};

/// Evaluate -sum A X B + sum C X D.
Eigen::MatrixXd apply_multi_term(const MultiTermSystem& system, const Eigen::MatrixXd& x);

/// Row-major flattening used throughout: entry (i, alpha) of an n x m matrix
/// lands at flat index alpha + i*m, matching the block layout of the
/// vectorized operator below.
Eigen::VectorXd flatten_row_major(const Eigen::MatrixXd& x);
Eigen::MatrixXd unflatten_row_major(const Eigen::VectorXd& v, Eigen::Index n, Eigen::Index m);

/// The dense (n*m) x (n*m) matrix E with
///   E(beta + i*m, alpha + j*m) = sum_l (-A_ij B_ab + C_ij D_ab),
/// factorized once and reused for every right-hand side.
class VectorizedOperator {
  public:
    explicit VectorizedOperator(MultiTermSystem system);

    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

    const Eigen::MatrixXd& e_matrix() const { return e_matrix_; }
    const MultiTermSystem& system() const { return system_; }
    double rcond() const { return rcond_; }

  private:
    MultiTermSystem system_;
    Eigen::MatrixXd e_matrix_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double rcond_ = 0.0;
};

VectorizedOperator assemble_vectorized(MultiTermSystem system);

}  // namespace dlrk
