#include "dlrk/mesh.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dlrk/error.hpp"

namespace dlrk {

SpatialMesh build_spherical_mesh(double total_radius, int n_cells) {
    if (!(total_radius > 0.0))
        throw ConfigError("mesh: total radius must be positive, got " +
                          std::to_string(total_radius));
    if (n_cells < 1)
        throw ConfigError("mesh: need at least one cell, got " + std::to_string(n_cells));

    constexpr double four_pi = 4.0 * std::numbers::pi;

    SpatialMesh mesh;
    mesh.n_cells = n_cells;
    mesh.dr = total_radius / n_cells;
    mesh.edges.resize(n_cells + 1);
    mesh.centers.resize(n_cells);
    mesh.volumes.resize(n_cells);
    mesh.surfaces.resize(n_cells + 1);

    for (int j = 0; j <= n_cells; ++j) {
        // edge N pinned to R exactly so shell lookups at the boundary are stable
        mesh.edges(j) = (j == n_cells) ? total_radius : j * mesh.dr;
        mesh.surfaces(j) = four_pi * mesh.edges(j) * mesh.edges(j);
    }
    for (int j = 0; j < n_cells; ++j) {
        mesh.centers(j) = 0.5 * (mesh.edges(j) + mesh.edges(j + 1));
        mesh.volumes(j) = (four_pi / 3.0) *
                          (std::pow(mesh.edges(j + 1), 3) - std::pow(mesh.edges(j), 3));
    }
    return mesh;
}

}  // namespace dlrk
