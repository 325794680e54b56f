#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dlrk {

/// Multigroup constants for one material. Scattering is stored in
/// right-action orientation: sigma_s(g_src, g_dst) so that a row vector of
/// fluxes times sigma_s yields the scattering source per destination group.
struct MaterialRecord {
    std::string name;
    Eigen::VectorXd diffusion;    // D_g [cm], > 0
    Eigen::VectorXd sigma_t;      // total [1/cm]
    Eigen::MatrixXd sigma_s;      // (source group, destination group) [1/cm]
    Eigen::VectorXd nu_sigma_f;   // nu * fission [1/cm]
    Eigen::VectorXd chi;          // emission spectrum, sums to 1 (or all zero)

    int n_groups() const { return static_cast<int>(diffusion.size()); }
    bool fissile() const { return nu_sigma_f.maxCoeff() > 0.0; }
};

/// Group energy boundaries in eV, descending (group 0 is the fastest).
struct EnergyGrid {
    int n_groups = 0;
    Eigen::VectorXd edges;   // n_groups+1, strictly decreasing
    Eigen::VectorXd widths;  // widths(g) = edges(g) - edges(g+1) > 0
};

struct MaterialLibrary {
    std::vector<MaterialRecord> materials;
    std::optional<EnergyGrid> energy_grid;

    int n_groups() const { return materials.empty() ? 0 : materials.front().n_groups(); }
    int n_materials() const { return static_cast<int>(materials.size()); }
    int find(const std::string& name) const;  // -1 if absent
};

/// Per-cell material densities rho(cell, material). Restricted to indicator
/// layouts: exactly one 1 per row, produced by shell lookup at cell centers.
struct DensityField {
    Eigen::MatrixXd rho;  // n_cells x n_materials

    int n_cells() const { return static_cast<int>(rho.rows()); }
    int n_materials() const { return static_cast<int>(rho.cols()); }
    /// Index of the material occupying cell j.
    int material_of(int j) const;
};

struct Shell {
    double outer_radius_cm = 0.0;
    std::string material;
};

struct SpatialMesh;

/// Parse and validate a material library document (JSON text, see README for
/// the schema). Errors carry the offending field path.
MaterialLibrary load_material_library(const std::string& document);
MaterialLibrary load_material_library_file(const std::string& path);

/// Serialize a library to the same JSON schema load_material_library reads.
std::string material_library_to_json(const MaterialLibrary& library);

DensityField build_density_field(const SpatialMesh& mesh, const MaterialLibrary& library,
                                 const std::vector<Shell>& shells);

/// Interface factor D_l*D_k/(D_l+D_k); equals half the harmonic mean.
double interface_diffusion_factor(double d_l, double d_k);

}  // namespace dlrk
