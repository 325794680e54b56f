#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "dlrk/materials.hpp"
#include "dlrk/power_dlra.hpp"

namespace dlrk {

/// SVD-aligned view of a low-rank solution: rotated spatial and energy modes
/// with their singular values. Mode signs are fixed so the first nonzero
/// entry of each spatial mode is positive.
struct ModeBundle {
    Eigen::VectorXd singular_values;  // descending
    Eigen::MatrixXd spatial_modes;    // N_x x r, orthonormal columns
    Eigen::MatrixXd energy_modes;     // G x r, orthonormal columns
};

ModeBundle extract_modes(const LowRankState& state);

/// Per-cell flux integrated over the thermal [0, 5] eV, epithermal
/// (5, 5e5] eV and fast (5e5, inf) ranges; groups straddling a boundary are
/// split in proportion to energy-width overlap. Columns: thermal,
/// epithermal, fast.
Eigen::MatrixXd energy_range_flux(const Eigen::MatrixXd& phi, const EnergyGrid& grid);

/// Group fluxes divided by group widths: phi(r, E) displayed per unit energy.
Eigen::MatrixXd average_spectrum(const Eigen::MatrixXd& phi, const EnergyGrid& grid);

/// Entry counts comparing the dense method against the low-rank one, both
/// for the per-step system matrix and for the solution representation.
struct MemoryReport {
    std::uint64_t full_entries = 0;     // N_x^2 G^2
    std::uint64_t dlra_entries = 0;     // r^2 N_x^2 + r^2 G^2
    std::uint64_t solution_full = 0;    // N_x G
    std::uint64_t solution_dlra = 0;    // N_x r + G r + r^2
};

MemoryReport memory_report(int n_x, int g, int r);

}  // namespace dlrk
