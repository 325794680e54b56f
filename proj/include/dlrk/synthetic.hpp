#pragma once

#include <cstdint>

#include "dlrk/materials.hpp"

namespace dlrk {

struct SyntheticOptions {
    int n_fissile = 1;            // leading materials carry fission data
    bool shared_fission = false;  // every material reuses material 0's fission data
};

/// Deterministic multigroup library generator: down-scatter-dominant
/// scattering, fast-peaked emission spectrum, log-spaced energy grid.
/// Same (groups, n_materials, seed, options) always yields the same library.
MaterialLibrary make_synthetic_library(int groups, int n_materials, std::uint64_t seed,
                                       const SyntheticOptions& options = {});

/// Single-material library with a group-independent diffusion coefficient,
/// which makes the fundamental mode of a one-zone sphere exactly separable
/// in space and energy (rank 1).
MaterialLibrary make_separable_library(int groups, std::uint64_t seed);

}  // namespace dlrk
