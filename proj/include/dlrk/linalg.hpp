#pragma once

#include <random>

#include <Eigen/Core>

namespace dlrk {

struct ThinQR {
    Eigen::MatrixXd q;  // orthonormal columns
    Eigen::MatrixXd r;  // upper triangular, nonnegative diagonal
};

/// Thin Householder QR with the sign of each row of R fixed so that the
/// diagonal is nonnegative, making the factor pair deterministic.
ThinQR qr_positive(const Eigen::MatrixXd& a);

/// || B^T B - I ||_F, zero for a matrix with orthonormal columns.
double orthonormality_error(const Eigen::MatrixXd& basis);

/// Orthonormal n x rank matrix whose first column is first_column normalized;
/// the remaining columns complete it from draws of rng.
Eigen::MatrixXd complete_orthonormal(const Eigen::VectorXd& first_column, int rank,
                                     std::mt19937_64& rng);

/// Dense matrix with standard normal entries drawn row-major from rng.
Eigen::MatrixXd random_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

}  // namespace dlrk
