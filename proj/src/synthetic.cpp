#include "dlrk/synthetic.hpp"

#include <cmath>
#include <random>

#include "dlrk/error.hpp"

namespace dlrk {

namespace {

EnergyGrid log_energy_grid(int groups) {
    EnergyGrid grid;
    grid.n_groups = groups;
    grid.edges.resize(groups + 1);
    grid.widths.resize(groups);
    const double e_top = 1.0e7;   // eV
    const double e_bottom = 1.0e-2;
    const double ratio = std::pow(e_bottom / e_top, 1.0 / groups);
    for (int i = 0; i <= groups; ++i)
        grid.edges(i) = e_top * std::pow(ratio, i);
    for (int g = 0; g < groups; ++g)
        grid.widths(g) = grid.edges(g) - grid.edges(g + 1);
    return grid;
}

Eigen::VectorXd fast_peaked_chi(int groups) {
    Eigen::VectorXd chi(groups);
    for (int g = 0; g < groups; ++g)
        chi(g) = std::exp(-0.9 * g);
    chi /= chi.sum();
    return chi;
}

}  // namespace

MaterialLibrary make_synthetic_library(int groups, int n_materials, std::uint64_t seed,
                                       const SyntheticOptions& options) {
    if (groups < 1 || n_materials < 1)
        throw ConfigError("synthetic library: groups and material count must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    MaterialLibrary lib;
    lib.energy_grid = log_energy_grid(groups);

    for (int m = 0; m < n_materials; ++m) {
        MaterialRecord mat;
        mat.name = "mat" + std::to_string(m);
        mat.diffusion.resize(groups);
        mat.sigma_t.resize(groups);
        mat.sigma_s.resize(groups, groups);
        mat.nu_sigma_f = Eigen::VectorXd::Zero(groups);
        mat.chi = Eigen::VectorXd::Zero(groups);

        for (int g = 0; g < groups; ++g) {
            mat.diffusion(g) = 0.6 + 1.4 * unit(rng);
            mat.sigma_t(g) = 0.6 + 0.8 * unit(rng);
        }

        // Down-scatter dominant: sources feed lower-energy (higher index)
        // groups, with a weak up-scatter tail. Rows scaled below total.
        for (int src = 0; src < groups; ++src) {
            for (int dst = 0; dst < groups; ++dst) {
                const double shape = (dst >= src) ? std::exp(-0.7 * (dst - src))
                                                  : 0.05 * std::exp(-2.0 * (src - dst));
                mat.sigma_s(src, dst) = shape * (0.5 + 0.5 * unit(rng));
            }
            const double scatter_fraction = 0.4 + 0.45 * unit(rng);
            mat.sigma_s.row(src) *=
                scatter_fraction * mat.sigma_t(src) / mat.sigma_s.row(src).sum();
        }

        const bool fissile = m < options.n_fissile;
        if (fissile) {
            for (int g = 0; g < groups; ++g)
                mat.nu_sigma_f(g) = 0.1 + 0.3 * unit(rng);
            mat.chi = fast_peaked_chi(groups);
        }
        lib.materials.push_back(std::move(mat));
    }

    if (options.shared_fission) {
        for (int m = 1; m < n_materials; ++m) {
            lib.materials[m].nu_sigma_f = lib.materials[0].nu_sigma_f;
            lib.materials[m].chi = lib.materials[0].chi;
        }
    }
    return lib;
}

MaterialLibrary make_separable_library(int groups, std::uint64_t seed) {
    MaterialLibrary lib = make_synthetic_library(groups, 1, seed);
    lib.materials[0].diffusion.setConstant(1.0);
    return lib;
}

}  // namespace dlrk
