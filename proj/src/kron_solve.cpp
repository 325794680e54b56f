#include "dlrk/kron_solve.hpp"

#include <string>
#include <utility>

#include "dlrk/error.hpp"

namespace dlrk {

namespace {
constexpr double kResidualTol = 1e-10;
constexpr double kRcondFloor = 1e-14;
}  // namespace

void MultiTermSystem::validate() const {
    if (left_a.size() != right_b.size())
        throw AssemblyError("kron system: A/B term lists differ in length");
    if (left_c.size() != right_d.size())
        throw AssemblyError("kron system: C/D term lists differ in length");
    auto check = [&](const Eigen::MatrixXd& mat, Eigen::Index size, const char* which) {
        if (mat.rows() != size || mat.cols() != size)
            throw AssemblyError(std::string("kron system: ") + which +
                                " term is not square of declared size");
    };
    for (const auto& a : left_a) check(a, n, "A");
    for (const auto& b : right_b) check(b, m, "B");
    for (const auto& c : left_c) check(c, n, "C");
    for (const auto& d : right_d) check(d, m, "D");
}

Eigen::MatrixXd apply_multi_term(const MultiTermSystem& system, const Eigen::MatrixXd& x) {
    if (x.rows() != system.n || x.cols() != system.m)
        throw AssemblyError("apply_multi_term: operand shape mismatch");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(system.n, system.m);
    for (std::size_t t = 0; t < system.left_a.size(); ++t)
        out.noalias() -= system.left_a[t] * x * system.right_b[t];
    for (std::size_t t = 0; t < system.left_c.size(); ++t)
        out.noalias() += system.left_c[t] * x * system.right_d[t];
    return out;
}

Eigen::VectorXd flatten_row_major(const Eigen::MatrixXd& x) {
    Eigen::VectorXd v(x.size());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        v.segment(i * x.cols(), x.cols()) = x.row(i).transpose();
    return v;
}

Eigen::MatrixXd unflatten_row_major(const Eigen::VectorXd& v, Eigen::Index n, Eigen::Index m) {
    if (v.size() != n * m)
        throw AssemblyError("unflatten_row_major: size mismatch");
    Eigen::MatrixXd x(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        x.row(i) = v.segment(i * m, m).transpose();
    return x;
}

VectorizedOperator::VectorizedOperator(MultiTermSystem system) : system_(std::move(system)) {
    system_.validate();
    const Eigen::Index n = system_.n;
    const Eigen::Index m = system_.m;
    e_matrix_ = Eigen::MatrixXd::Zero(n * m, n * m);

    // Block (i, j) of E is sum_l (-A_ij + C_ij) * (B or D transposed): the
    // right factors act on row indices of X, hence the transpose under the
    // row-major flattening.
    for (std::size_t t = 0; t < system_.left_a.size(); ++t) {
        const auto& a = system_.left_a[t];
        const Eigen::MatrixXd bt = system_.right_b[t].transpose();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (a(i, j) != 0.0) e_matrix_.block(i * m, j * m, m, m) -= a(i, j) * bt;
    }
    for (std::size_t t = 0; t < system_.left_c.size(); ++t) {
        const auto& c = system_.left_c[t];
        const Eigen::MatrixXd dt = system_.right_d[t].transpose();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (c(i, j) != 0.0) e_matrix_.block(i * m, j * m, m, m) += c(i, j) * dt;
    }

    lu_.compute(e_matrix_);
    rcond_ = lu_.rcond();
    if (!(rcond_ > kRcondFloor))
        throw SolverError("kron solve: vectorized operator is singular to working "
                          "precision (rcond estimate " + std::to_string(rcond_) + ")");
}

Eigen::MatrixXd VectorizedOperator::solve(const Eigen::MatrixXd& rhs) const {
    if (rhs.rows() != system_.n || rhs.cols() != system_.m)
        throw AssemblyError("kron solve: rhs shape mismatch");
    const Eigen::VectorXd x_flat = lu_.solve(flatten_row_major(rhs));
    Eigen::MatrixXd x = unflatten_row_major(x_flat, system_.n, system_.m);

    const double rhs_norm = rhs.norm();
    const double residual = (apply_multi_term(system_, x) - rhs).norm();
    if (residual > kResidualTol * rhs_norm)
        throw SolverError("kron solve: residual " + std::to_string(residual) +
                          " exceeds tolerance " + std::to_string(kResidualTol * rhs_norm) +
                          " (rcond estimate " + std::to_string(rcond_) + ")");
    return x;
}

VectorizedOperator assemble_vectorized(MultiTermSystem system) {
    return VectorizedOperator(std::move(system));
}

}  // namespace dlrk
