#include "dlrk/linalg.hpp"

#include <algorithm>

#include <Eigen/QR>

#include "dlrk/error.hpp"

namespace dlrk {

ThinQR qr_positive(const Eigen::MatrixXd& a) {
    // p orthonormal columns; for wide inputs R stays upper trapezoidal
    const Eigen::Index p = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    ThinQR out;
    out.q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), p);
    out.r = qr.matrixQR().topRows(p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < std::min(i, out.r.cols()); ++j) out.r(i, j) = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        if (out.r(i, i) < 0.0) {
            out.q.col(i) = -out.q.col(i);
            out.r.row(i) = -out.r.row(i);
        }
    }
    return out;
}

double orthonormality_error(const Eigen::MatrixXd& basis) {
    const Eigen::Index r = basis.cols();
    return (basis.transpose() * basis - Eigen::MatrixXd::Identity(r, r)).norm();
}

Eigen::MatrixXd random_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    return m;
}

Eigen::MatrixXd complete_orthonormal(const Eigen::VectorXd& first_column, int rank,
                                     std::mt19937_64& rng) {
    const Eigen::Index n = first_column.size();
    if (rank < 1 || rank > n)
        throw ConfigError("complete_orthonormal: rank out of range");
    if (first_column.norm() == 0.0)
        throw ConfigError("complete_orthonormal: seed column is zero");
    Eigen::MatrixXd seed(n, rank);
    seed.col(0) = first_column;
    if (rank > 1) seed.rightCols(rank - 1) = random_normal(n, rank - 1, rng);
    return qr_positive(seed).q;
}

}  // namespace dlrk
