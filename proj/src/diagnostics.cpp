#include "dlrk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "dlrk/error.hpp"

namespace dlrk {

ModeBundle extract_modes(const LowRankState& state) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(state.coeff,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    ModeBundle bundle;
    bundle.singular_values = svd.singularValues();
    bundle.spatial_modes = state.x_basis * svd.matrixU();
    bundle.energy_modes = state.w_basis * svd.matrixV();

    // sign fix per singular pair, keeping the reconstruction unchanged
    for (Eigen::Index i = 0; i < bundle.singular_values.size(); ++i) {
        for (Eigen::Index j = 0; j < bundle.spatial_modes.rows(); ++j) {
            const double entry = bundle.spatial_modes(j, i);
            if (std::abs(entry) > 1e-12) {
                if (entry < 0.0) {
                    bundle.spatial_modes.col(i) = -bundle.spatial_modes.col(i);
                    bundle.energy_modes.col(i) = -bundle.energy_modes.col(i);
                }
                break;
            }
        }
    }
    return bundle;
}

Eigen::MatrixXd energy_range_flux(const Eigen::MatrixXd& phi, const EnergyGrid& grid) {
    if (grid.n_groups != phi.cols())
        throw ConfigError("energy_range_flux: grid and flux disagree on group count");

    constexpr double kThermalTop = 5.0;       // eV
    constexpr double kEpithermalTop = 5.0e5;  // eV
    const double ranges[4] = {0.0, kThermalTop, kEpithermalTop,
                              std::numeric_limits<double>::infinity()};

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(phi.rows(), 3);
    for (int g = 0; g < grid.n_groups; ++g) {
        const double lo = grid.edges(g + 1);
        const double hi = grid.edges(g);
        for (int range = 0; range < 3; ++range) {
            const double overlap =
                std::min(hi, ranges[range + 1]) - std::max(lo, ranges[range]);
            if (overlap <= 0.0) continue;
            const double fraction = overlap / (hi - lo);
            out.col(range) += fraction * phi.col(g);
        }
    }
    return out;
}

Eigen::MatrixXd average_spectrum(const Eigen::MatrixXd& phi, const EnergyGrid& grid) {
    if (grid.n_groups != phi.cols())
        throw ConfigError("average_spectrum: grid and flux disagree on group count");
    Eigen::MatrixXd out = phi;
    for (int g = 0; g < grid.n_groups; ++g) out.col(g) /= grid.widths(g);
    return out;
}

MemoryReport memory_report(int n_x, int g, int r) {
    if (n_x < 1 || g < 1 || r < 1)
        throw ConfigError("memory_report: sizes must be positive");
    const auto nx = static_cast<std::uint64_t>(n_x);
    const auto gg = static_cast<std::uint64_t>(g);
    const auto rr = static_cast<std::uint64_t>(r);
    MemoryReport report;
    report.full_entries = nx * nx * gg * gg;
    report.dlra_entries = rr * rr * nx * nx + rr * rr * gg * gg;
    report.solution_full = nx * gg;
    report.solution_dlra = nx * rr + gg * rr + rr * rr;
    return report;
}

}  // namespace dlrk
