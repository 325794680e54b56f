#include "dlrk/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "dlrk/diagnostics.hpp"
#include "dlrk/power_dlra.hpp"
#include "dlrk/power_full.hpp"
#include "dlrk/simplified.hpp"
#include "dlrk/synthetic.hpp"

namespace dlrk {

namespace fs = std::filesystem;

std::string format_float(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out)
        throw ConfigError("outputs: cannot write '" + (dir / name).string() + "'");
    return out;
}

void write_history(const fs::path& dir, const ConvergenceHistory& history,
                   bool emit_timings) {
    auto out = open_output(dir, "history.csv");
    out << "iter,k,delta_k,rank,wall_seconds\n";
    for (int i = 0; i < history.iterations; ++i) {
        const double seconds = emit_timings ? history.wall_seconds[i] : 0.0;
        out << (i + 1) << ',' << format_float(history.k_estimates[i]) << ','
            << format_float(history.deltas[i]) << ',' << history.ranks[i] << ','
            << format_float(seconds) << '\n';
    }
}

void write_modes(const fs::path& dir, const SpatialMesh& mesh, const LowRankState& state) {
    const ModeBundle bundle = extract_modes(state);
    {
        auto out = open_output(dir, "singular_values.csv");
        out << "index,sigma\n";
        for (Eigen::Index i = 0; i < bundle.singular_values.size(); ++i)
            out << (i + 1) << ',' << format_float(bundle.singular_values(i)) << '\n';
    }
    {
        auto out = open_output(dir, "modes_space.csv");
        out << "r_cm";
        for (Eigen::Index i = 0; i < bundle.spatial_modes.cols(); ++i)
            out << ",mode_" << (i + 1);
        out << '\n';
        for (Eigen::Index j = 0; j < bundle.spatial_modes.rows(); ++j) {
            out << format_float(mesh.centers(j));
            for (Eigen::Index i = 0; i < bundle.spatial_modes.cols(); ++i)
                out << ',' << format_float(bundle.spatial_modes(j, i));
            out << '\n';
        }
    }
    {
        auto out = open_output(dir, "modes_energy.csv");
        out << "group";
        for (Eigen::Index i = 0; i < bundle.energy_modes.cols(); ++i)
            out << ",mode_" << (i + 1);
        out << '\n';
        for (Eigen::Index g = 0; g < bundle.energy_modes.rows(); ++g) {
            out << (g + 1);
            for (Eigen::Index i = 0; i < bundle.energy_modes.cols(); ++i)
                out << ',' << format_float(bundle.energy_modes(g, i));
            out << '\n';
        }
    }
}

void write_flux(const fs::path& dir, const SpatialMesh& mesh, const MaterialLibrary& library,
                const Eigen::MatrixXd& phi) {
    if (!library.energy_grid) {
        std::cerr << "warning: no energy_edges_ev in the material library, "
                     "flux_ranges.csv skipped\n";
        return;
    }
    const Eigen::MatrixXd ranges = energy_range_flux(phi, *library.energy_grid);
    auto out = open_output(dir, "flux_ranges.csv");
    out << "r_cm,thermal,epithermal,fast\n";
    for (Eigen::Index j = 0; j < ranges.rows(); ++j)
        out << format_float(mesh.centers(j)) << ',' << format_float(ranges(j, 0)) << ','
            << format_float(ranges(j, 1)) << ',' << format_float(ranges(j, 2)) << '\n';
}

void write_memory(const fs::path& dir, int n_x, int g, int r) {
    const MemoryReport report = memory_report(n_x, g, r);
    auto out = open_output(dir, "memory.csv");
    out << "quantity,entries\n";
    out << "full_system," << report.full_entries << '\n';
    out << "dlra_system," << report.dlra_entries << '\n';
    out << "solution_full," << report.solution_full << '\n';
    out << "solution_dlra," << report.solution_dlra << '\n';
    out << "dlra_system_per_step," << dlra_system_entries_per_step(n_x, g, r) << '\n';
}

void write_summary(const fs::path& dir, const ProblemConfig& config, double k_eff,
                   int iterations, bool converged, int rank) {
    auto out = open_output(dir, "summary.txt");
    out << "mode=" << to_string(config.mode) << '\n';
    out << "k_eff=" << format_float(k_eff) << '\n';
    out << "iterations=" << iterations << '\n';
    out << "converged=" << (converged ? "true" : "false") << '\n';
    out << "rank=" << rank << '\n';
}

void write_error(const fs::path& dir, const std::string& error_class,
                 const std::string& message) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "error.txt", std::ios::binary);
    if (!out) return;
    out << "error_class=" << error_class << '\n';
    out << "message=" << message << '\n';
}

LowRankState state_from_dense(const Eigen::MatrixXd& phi) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    LowRankState state;
    state.x_basis = svd.matrixU();
    state.coeff = svd.singularValues().asDiagonal();
    state.w_basis = svd.matrixV();
    return state;
}

double rate_or_nan(const std::vector<double>& errors) {
    try {
        return fit_geometric_rate(errors);
    } catch (const MeasurementError&) {
        return std::nan("");
    }
}

RunStatus run_simplified(const ProblemConfig& config, const fs::path& dir) {
    const SimplifiedSpec& spec = *config.simplified;
    SpectraOptions options;
    options.identity_similarity = spec.identity_similarity;

    const double lambda_ratio =
        spec.lambdas.size() > 1 ? std::abs(spec.lambdas[1] / spec.lambdas[0]) : 0.0;
    const double sigma_ratio =
        spec.sigmas.size() > 1 ? std::abs(spec.sigmas[1] / spec.sigmas[0]) : 0.0;

    auto rates = open_output(dir, "rates.csv");
    rates << "seed,n,m,rank,k_target,k_final,k_rate,k_bound,x_rate,x_bound,w_rate,w_bound\n";

    bool all_converged = true;
    std::optional<TwoSidedDlraResult> first;
    for (std::uint64_t seed : spec.seeds) {
        const TwoSidedProblem problem =
            construct_from_spectra(spec.lambdas, spec.sigmas, seed, options);
        const LowRankState init = make_two_sided_init(problem, spec.rank, seed + 1);
        TwoSidedDlraResult result;
        try {
            result = dlra_two_sided_iteration(problem, init, config.eps, config.max_iter);
        } catch (const NonConvergenceError& e) {
            all_converged = false;
            write_history(dir, e.history, config.emit_timings);
            write_summary(dir, config, e.k_last, e.history.iterations, false, spec.rank);
            return RunStatus::not_converged;
        }
        rates << seed << ',' << problem.n() << ',' << problem.m() << ',' << spec.rank << ','
              << format_float(problem.dominant_product()) << ',' << format_float(result.k)
              << ',' << format_float(rate_or_nan(result.k_errors)) << ','
              << format_float(std::max(lambda_ratio, sigma_ratio)) << ','
              << format_float(rate_or_nan(result.x_align_errors)) << ','
              << format_float(lambda_ratio) << ','
              << format_float(rate_or_nan(result.w_align_errors)) << ','
              << format_float(sigma_ratio) << '\n';
        if (!first) first = std::move(result);
    }

    if (config.emit_history) write_history(dir, first->history, config.emit_timings);
    write_summary(dir, config, first->k, first->history.iterations, all_converged,
                  spec.rank);
    return all_converged ? RunStatus::converged : RunStatus::not_converged;
}

RunStatus run_sphere(const ProblemConfig& config, const fs::path& dir) {
    const SpatialMesh mesh = build_spherical_mesh(config.radius_cm, config.n_cells);
    const MaterialLibrary library = load_material_library_file(config.materials_file);
    const DensityField density = build_density_field(mesh, library, config.shells);
    const OperatorSet ops = assemble_operators(mesh, library, density, config.boundary);
    const int max_rank = std::min(ops.n_cells, ops.n_groups);

    double k_eff = 0.0;
    int rank = max_rank;
    bool converged = true;
    ConvergenceHistory history;
    std::optional<LowRankState> state;
    std::optional<Eigen::MatrixXd> phi;

    try {
        switch (config.mode) {
            case SolverMode::full: {
                PowerOptions options{config.eps, config.max_iter};
                FullSolveResult result = full_power_iteration(ops, options);
                k_eff = result.k_eff;
                history = std::move(result.history);
                state = state_from_dense(result.phi);
                phi = std::move(result.phi);
                break;
            }
            case SolverMode::dlra: {
                DlraOptions options{config.eps, config.max_iter};
                const LowRankState init = make_seed_state(ops, *config.rank, config.seed);
                DlraSolveResult result = dlra_power_iteration(ops, init, options);
                k_eff = result.k_eff;
                rank = result.state.rank();
                history = std::move(result.history);
                phi = result.state.reconstruct();
                state = std::move(result.state);
                break;
            }
            case SolverMode::dlra_adaptive: {
                AdaptiveOptions options;
                options.eps = config.eps;
                options.max_iter = config.max_iter;
                if (config.theta) {
                    options.theta = *config.theta;
                    options.theta_relative = false;
                }
                options.r_min = config.r_min;
                options.r_max = config.r_max.value_or(max_rank);
                const int init_rank =
                    std::clamp(config.rank.value_or(options.r_min), 1, max_rank);
                const LowRankState init = make_seed_state(ops, init_rank, config.seed);
                DlraSolveResult result = dlra_power_iteration_adaptive(ops, init, options);
                k_eff = result.k_eff;
                rank = result.state.rank();
                history = std::move(result.history);
                phi = result.state.reconstruct();
                state = std::move(result.state);
                break;
            }
            case SolverMode::simplified:
                break;  // handled elsewhere
        }
    } catch (const DlraNonConvergence& e) {
        converged = false;
        k_eff = e.k_last;
        history = e.history;
        rank = e.state.rank();
        phi = e.state.reconstruct();
        state = e.state;
    } catch (const FullNonConvergence& e) {
        converged = false;
        k_eff = e.k_last;
        history = e.history;
        state = state_from_dense(e.phi);
        phi = e.phi;
    }

    if (config.emit_history) write_history(dir, history, config.emit_timings);
    if (config.emit_modes && state) write_modes(dir, mesh, *state);
    if (config.emit_flux && phi) write_flux(dir, mesh, library, *phi);
    if (config.emit_memory) write_memory(dir, ops.n_cells, ops.n_groups, rank);
    write_summary(dir, config, k_eff, history.iterations, converged, rank);
    return converged ? RunStatus::converged : RunStatus::not_converged;
}

}  // namespace

RunStatus run(const ProblemConfig& config) {
    const fs::path dir(config.out_directory);
    try {
        fs::create_directories(dir);
        if (config.mode == SolverMode::simplified) return run_simplified(config, dir);
        return run_sphere(config, dir);
    } catch (const ConfigError& e) {
        write_error(dir, "ConfigError", e.what());
        std::cerr << "error: " << e.what() << '\n';
        return RunStatus::error;
    } catch (const Error& e) {
        write_error(dir, "SolverError", e.what());
        std::cerr << "error: " << e.what() << '\n';
        return RunStatus::error;
    }
}

}  // namespace dlrk
