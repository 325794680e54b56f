#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dlrk/config.hpp"
#include "dlrk/error.hpp"
#include "dlrk/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"k-eigenvalue solver for multigroup diffusion on spheres, with dense and "
                 "low-rank inverse power iterations"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> mode;
    std::optional<int> rank;
    std::optional<double> eps;
    std::optional<double> theta;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;

    CLI::App* solve = app.add_subcommand("solve", "run the solver described by a config file");
    solve->add_option("config", config_path, "path to the JSON config")->required();
    solve->add_option("--mode", mode, "override solver mode (full, dlra, dlra-adaptive, simplified)");
    solve->add_option("--rank", rank, "override the low-rank solver rank");
    solve->add_option("--eps", eps, "override the convergence tolerance");
    solve->add_option("--theta", theta, "override the adaptive truncation tolerance (absolute)");
    solve->add_option("--seed", seed, "override the random seed");
    solve->add_option("--out-dir", out_dir, "override the output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        dlrk::ProblemConfig config = dlrk::parse_config(config_path);
        if (mode) config.mode = dlrk::solver_mode_from_string(*mode);
        if (rank) config.rank = *rank;
        if (eps) config.eps = *eps;
        if (theta) config.theta = *theta;
        if (seed) config.seed = *seed;
        if (out_dir) config.out_directory = *out_dir;

        if (config.mode == dlrk::SolverMode::dlra && !config.rank)
            throw dlrk::ConfigError("solver.rank: rank required for dlra mode");
        if (config.mode == dlrk::SolverMode::simplified && !config.simplified)
            throw dlrk::ConfigError("simplified: section required for simplified mode");
        if (!(config.eps > 0.0))
            throw dlrk::ConfigError("solver.eps: must be positive");

        return static_cast<int>(dlrk::run(config));
    } catch (const dlrk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
