#pragma once

#include <vector>

#include <Eigen/Core>

#include "dlrk/materials.hpp"
#include "dlrk/mesh.hpp"

namespace dlrk {

/// Banded storage for the spatial diffusion stencils.
struct TridiagonalMatrix {
    Eigen::VectorXd lower;  // entry j = A(j+1, j)
    Eigen::VectorXd diag;   // entry j = A(j, j)
    Eigen::VectorXd upper;  // entry j = A(j, j+1)

    static TridiagonalMatrix zero(int n);
    int rows() const { return static_cast<int>(diag.size()); }
    bool is_zero() const;
    Eigen::MatrixXd to_dense() const;
    /// Row-wise product T * phi for phi with rows() rows.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& phi) const;
};

/// How the outermost cell face is closed. The center face has zero area and
/// needs no treatment.
enum class BoundaryCondition {
    zero_flux,   // ghost cell at zero flux, same material as the last cell
    reflective,  // no leakage through the outer face
};

/// One active (l, k) material pair: the geometry-weighted spatial stencil
/// and the per-group interface diffusion factors that multiply it.
struct SpatialPair {
    int l = 0;
    int k = 0;
    TridiagonalMatrix stencil;  // N_x x N_x, 1/cm^2 scale
    Eigen::VectorXd m_diag;     // G entries D_g^(l) D_g^(k) / (D_g^(l) + D_g^(k))
};

/// Every matrix the iteration needs. Energy-side matrices act from the right
/// on an N_x x G flux, so scattering and fission are stored with
/// (source group, destination group) indexing.
struct OperatorSet {
    int n_cells = 0;
    int n_groups = 0;
    int n_materials = 0;
    BoundaryCondition boundary = BoundaryCondition::zero_flux;

    std::vector<SpatialPair> pairs;        // pairs with identically zero stencils dropped
    std::vector<Eigen::VectorXd> rho;      // per material, diagonal of rho^(l)
    std::vector<Eigen::MatrixXd> removal;  // per material, Sigma_t - Sigma_s
    std::vector<Eigen::MatrixXd> fission;  // per material, nu_sigma_f * chi^T

    const SpatialPair* find_pair(int l, int k) const;
};

OperatorSet assemble_operators(const SpatialMesh& mesh, const MaterialLibrary& library,
                               const DensityField& density,
                               BoundaryCondition boundary = BoundaryCondition::zero_flux);

/// Loss side of the iteration: -sum_lk D^(l,k) phi M^(l,k) + sum_l rho^(l) phi Sigma^(l).
Eigen::MatrixXd apply_lhs(const OperatorSet& ops, const Eigen::MatrixXd& phi);

/// Fission source: sum_l rho^(l) phi SigmaF^(l).
Eigen::MatrixXd apply_fission(const OperatorSet& ops, const Eigen::MatrixXd& phi);

}  // namespace dlrk
