#include "dlrk/operators.hpp"

#include <map>
#include <string>
#include <utility>

#include "dlrk/error.hpp"

namespace dlrk {

TridiagonalMatrix TridiagonalMatrix::zero(int n) {
    TridiagonalMatrix t;
    t.lower = Eigen::VectorXd::Zero(n > 0 ? n - 1 : 0);
    t.diag = Eigen::VectorXd::Zero(n);
    t.upper = Eigen::VectorXd::Zero(n > 0 ? n - 1 : 0);
    return t;
}

bool TridiagonalMatrix::is_zero() const {
    auto all_zero = [](const Eigen::VectorXd& v) {
        return v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0;
    };
    return all_zero(lower) && all_zero(diag) && all_zero(upper);
}

Eigen::MatrixXd TridiagonalMatrix::to_dense() const {
    const int n = rows();
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        dense(j, j) = diag(j);
        if (j + 1 < n) {
            dense(j, j + 1) = upper(j);
            dense(j + 1, j) = lower(j);
        }
    }
    return dense;
}

Eigen::MatrixXd TridiagonalMatrix::apply(const Eigen::MatrixXd& phi) const {
    const int n = rows();
    Eigen::MatrixXd out(n, phi.cols());
    for (int j = 0; j < n; ++j) {
        out.row(j) = diag(j) * phi.row(j);
        if (j > 0) out.row(j) += lower(j - 1) * phi.row(j - 1);
        if (j + 1 < n) out.row(j) += upper(j) * phi.row(j + 1);
    }
    return out;
}

const SpatialPair* OperatorSet::find_pair(int l, int k) const {
    for (const auto& pair : pairs)
        if (pair.l == l && pair.k == k) return &pair;
    return nullptr;
}

OperatorSet assemble_operators(const SpatialMesh& mesh, const MaterialLibrary& library,
                               const DensityField& density, BoundaryCondition boundary) {
    const int n_cells = mesh.n_cells;
    const int n_groups = library.n_groups();
    const int n_materials = library.n_materials();
    if (density.n_cells() != n_cells)
        throw AssemblyError("assemble_operators: density field has " +
                            std::to_string(density.n_cells()) + " cells, mesh has " +
                            std::to_string(n_cells));
    if (density.n_materials() != n_materials)
        throw AssemblyError("assemble_operators: density field and library disagree on "
                            "material count");
    for (const auto& mat : library.materials)
        if (mat.n_groups() != n_groups)
            throw AssemblyError("assemble_operators: group count mismatch in library");

    OperatorSet ops;
    ops.n_cells = n_cells;
    ops.n_groups = n_groups;
    ops.n_materials = n_materials;
    ops.boundary = boundary;

    std::map<std::pair<int, int>, TridiagonalMatrix> stencils;
    auto stencil_of = [&](int l, int k) -> TridiagonalMatrix& {
        auto it = stencils.find({l, k});
        if (it == stencils.end())
            it = stencils.emplace(std::make_pair(l, k), TridiagonalMatrix::zero(n_cells)).first;
        return it->second;
    };

    // Face between cells j and j+1: coefficient rho_j^(l) rho_{j+1}^(k)
    // (rho_j^(l) + rho_{j+1}^(k)) S, accumulated into the rows of both cells.
    // For indicator densities exactly one (l, k) pair survives per face and
    // the density factor equals 2, which restores the harmonic-mean face
    // coefficient once multiplied by the per-group factor in m_diag.
    for (int j = 0; j + 1 < n_cells; ++j) {
        const double surface = mesh.surfaces(j + 1);
        for (int l = 0; l < n_materials; ++l) {
            const double rho_l = density.rho(j, l);
            if (rho_l == 0.0) continue;
            for (int k = 0; k < n_materials; ++k) {
                const double rho_k = density.rho(j + 1, k);
                if (rho_k == 0.0) continue;
                const double coeff = rho_l * rho_k * (rho_l + rho_k) * surface;
                TridiagonalMatrix& up = stencil_of(l, k);
                up.upper(j) += coeff / (mesh.dr * mesh.volumes(j));
                up.diag(j) -= coeff / (mesh.dr * mesh.volumes(j));
            }
        }
        // Same face seen from cell j+1, with the material roles swapped.
        for (int l = 0; l < n_materials; ++l) {
            const double rho_l = density.rho(j + 1, l);
            if (rho_l == 0.0) continue;
            for (int k = 0; k < n_materials; ++k) {
                const double rho_k = density.rho(j, k);
                if (rho_k == 0.0) continue;
                const double coeff = rho_l * rho_k * (rho_l + rho_k) * surface;
                TridiagonalMatrix& down = stencil_of(l, k);
                down.lower(j) += coeff / (mesh.dr * mesh.volumes(j + 1));
                down.diag(j + 1) -= coeff / (mesh.dr * mesh.volumes(j + 1));
            }
        }
    }

    // Outer face. Zero-flux closes it against a ghost cell holding the same
    // material at zero flux: the leakage stays on the diagonal and the ghost
    // coupling is dropped. Reflective drops the face entirely.
    if (boundary == BoundaryCondition::zero_flux && n_cells > 0) {
        const int j = n_cells - 1;
        const double surface = mesh.surfaces(n_cells);
        for (int l = 0; l < n_materials; ++l) {
            const double rho_l = density.rho(j, l);
            if (rho_l == 0.0) continue;
            const double coeff = rho_l * rho_l * (rho_l + rho_l) * surface;
            stencil_of(l, l).diag(j) -= coeff / (mesh.dr * mesh.volumes(j));
        }
    }

    for (auto& [key, stencil] : stencils) {
        if (stencil.is_zero()) continue;
        SpatialPair pair;
        pair.l = key.first;
        pair.k = key.second;
        pair.stencil = std::move(stencil);
        pair.m_diag.resize(n_groups);
        const auto& d_l = library.materials[pair.l].diffusion;
        const auto& d_k = library.materials[pair.k].diffusion;
        for (int g = 0; g < n_groups; ++g)
            pair.m_diag(g) = interface_diffusion_factor(d_l(g), d_k(g));
        ops.pairs.push_back(std::move(pair));
    }

    for (int l = 0; l < n_materials; ++l) {
        ops.rho.push_back(density.rho.col(l));
        const auto& mat = library.materials[l];
        Eigen::MatrixXd removal = -mat.sigma_s;
        removal.diagonal() += mat.sigma_t;
        ops.removal.push_back(std::move(removal));
        ops.fission.push_back(mat.nu_sigma_f * mat.chi.transpose());
    }
    return ops;
}

namespace {

void check_shape(const OperatorSet& ops, const Eigen::MatrixXd& phi, const char* where) {
    if (phi.rows() != ops.n_cells || phi.cols() != ops.n_groups)
        throw AssemblyError(std::string(where) + ": flux shape (" +
                            std::to_string(phi.rows()) + ", " + std::to_string(phi.cols()) +
                            ") does not match operators (" + std::to_string(ops.n_cells) +
                            ", " + std::to_string(ops.n_groups) + ")");
}

}  // namespace

Eigen::MatrixXd apply_lhs(const OperatorSet& ops, const Eigen::MatrixXd& phi) {
    check_shape(ops, phi, "apply_lhs");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(phi.rows(), phi.cols());
    for (const auto& pair : ops.pairs)
        out.noalias() -= pair.stencil.apply(phi) * pair.m_diag.asDiagonal();
    for (int l = 0; l < ops.n_materials; ++l)
        out.noalias() += ops.rho[l].asDiagonal() * (phi * ops.removal[l]);
    return out;
}

Eigen::MatrixXd apply_fission(const OperatorSet& ops, const Eigen::MatrixXd& phi) {
    check_shape(ops, phi, "apply_fission");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(phi.rows(), phi.cols());
    for (int l = 0; l < ops.n_materials; ++l) {
        if (ops.fission[l].cwiseAbs().maxCoeff() == 0.0) continue;
        out.noalias() += ops.rho[l].asDiagonal() * (phi * ops.fission[l]);
    }
    return out;
}

}  // namespace dlrk
