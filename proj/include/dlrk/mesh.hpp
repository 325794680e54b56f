#pragma once

#include <Eigen/Core>

namespace dlrk {

/// Uniform finite-volume mesh on a sphere of radius R, cells indexed from the
/// center outward. Edge j sits at r = j*dr; surfaces[0] is the sphere center
/// (area 0), so the innermost face carries no flux and the center is
/// naturally reflecting.
struct SpatialMesh {
    int n_cells = 0;
    double dr = 0.0;               // cell width [cm]
    Eigen::VectorXd edges;         // n_cells+1 radii [cm]
    Eigen::VectorXd centers;       // n_cells cell-center radii [cm]
    Eigen::VectorXd volumes;       // n_cells shell volumes [cm^3]
    Eigen::VectorXd surfaces;      // n_cells+1 face areas [cm^2]

    double total_radius() const { return edges(n_cells); }
};

SpatialMesh build_spherical_mesh(double total_radius, int n_cells);

}  // namespace dlrk
