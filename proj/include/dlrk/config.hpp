#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlrk/materials.hpp"
#include "dlrk/operators.hpp"

namespace dlrk {

enum class SolverMode { full, dlra, dlra_adaptive, simplified };

std::string to_string(SolverMode mode);
SolverMode solver_mode_from_string(const std::string& name);

struct SimplifiedSpec {
    std::vector<double> lambdas;
    std::vector<double> sigmas;
    std::vector<std::uint64_t> seeds;  // one problem per seed
    int rank = 2;
    bool identity_similarity = false;
};

struct ProblemConfig {
    // geometry and materials (unused in simplified mode)
    double radius_cm = 0.0;
    int n_cells = 0;
    std::string materials_file;
    std::vector<Shell> shells;
    BoundaryCondition boundary = BoundaryCondition::zero_flux;

    SolverMode mode = SolverMode::full;
    std::optional<int> rank;
    std::optional<double> theta;  // absolute truncation tolerance when set
    int r_min = 2;
    std::optional<int> r_max;
    double eps = 1e-6;
    int max_iter = 10000;
    std::uint64_t seed = 0;

    std::optional<SimplifiedSpec> simplified;

    std::string out_directory = "out";
    bool emit_history = true;
    bool emit_modes = true;
    bool emit_flux = true;
    bool emit_memory = true;
    bool emit_timings = false;  // keeps outputs byte-stable by default
};

/// Parse and validate a config file; relative material paths resolve against
/// the config file's directory.
ProblemConfig parse_config(const std::string& path);
ProblemConfig parse_config_text(const std::string& text, const std::string& base_dir);

/// Canonical serialization; parse_config_text(canonical_config(c)) round-trips.
std::string canonical_config(const ProblemConfig& config);

}  // namespace dlrk
