#include "dlrk/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dlrk/error.hpp"

namespace dlrk {

using ordered_json = nlohmann::ordered_json;

std::string to_string(SolverMode mode) {
    switch (mode) {
        case SolverMode::full: return "full";
        case SolverMode::dlra: return "dlra";
        case SolverMode::dlra_adaptive: return "dlra-adaptive";
        case SolverMode::simplified: return "simplified";
    }
    return "full";
}

SolverMode solver_mode_from_string(const std::string& name) {
    if (name == "full") return SolverMode::full;
    if (name == "dlra") return SolverMode::dlra;
    if (name == "dlra-adaptive") return SolverMode::dlra_adaptive;
    if (name == "simplified") return SolverMode::simplified;
    throw ConfigError("solver.mode: unknown mode '" + name +
                      "' (expected full, dlra, dlra-adaptive or simplified)");
}

namespace {

const ordered_json& require(const ordered_json& node, const char* key,
                            const std::string& path) {
    if (!node.contains(key))
        throw ConfigError(path + "." + key + ": required field missing");
    return node.at(key);
}

std::vector<double> number_list(const ordered_json& node, const std::string& path) {
    if (!node.is_array() || node.empty())
        throw ConfigError(path + ": expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& v : node) {
        if (!v.is_number()) throw ConfigError(path + ": expected a number");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

ProblemConfig parse_config_text(const std::string& text, const std::string& base_dir) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    ProblemConfig cfg;

    const auto& solver = require(doc, "solver", "config");
    cfg.mode = solver_mode_from_string(
        require(solver, "mode", "solver").get<std::string>());
    if (solver.contains("rank")) cfg.rank = solver.at("rank").get<int>();
    if (solver.contains("theta")) cfg.theta = solver.at("theta").get<double>();
    if (solver.contains("r_min")) cfg.r_min = solver.at("r_min").get<int>();
    if (solver.contains("r_max")) cfg.r_max = solver.at("r_max").get<int>();
    if (solver.contains("eps")) cfg.eps = solver.at("eps").get<double>();
    if (solver.contains("max_iter")) cfg.max_iter = solver.at("max_iter").get<int>();
    if (solver.contains("seed")) cfg.seed = solver.at("seed").get<std::uint64_t>();
    if (!(cfg.eps > 0.0)) throw ConfigError("solver.eps: must be positive");
    if (cfg.max_iter < 1) throw ConfigError("solver.max_iter: must be positive");

    if (cfg.mode == SolverMode::dlra && !cfg.rank)
        throw ConfigError("solver.rank: rank required for dlra mode");
    if (cfg.rank && *cfg.rank < 1) throw ConfigError("solver.rank: must be positive");

    if (cfg.mode == SolverMode::simplified) {
        const auto& simp = require(doc, "simplified", "config");
        SimplifiedSpec spec;
        spec.lambdas = number_list(require(simp, "lambdas", "simplified"),
                                   "simplified.lambdas");
        spec.sigmas = number_list(require(simp, "sigmas", "simplified"),
                                  "simplified.sigmas");
        if (simp.contains("rank")) spec.rank = simp.at("rank").get<int>();
        if (simp.contains("identity_similarity"))
            spec.identity_similarity = simp.at("identity_similarity").get<bool>();
        if (simp.contains("seeds")) {
            for (const auto& s : simp.at("seeds"))
                spec.seeds.push_back(s.get<std::uint64_t>());
        }
        if (spec.seeds.empty()) spec.seeds.push_back(cfg.seed);
        if (spec.rank < 1 ||
            spec.rank > static_cast<int>(std::min(spec.lambdas.size(), spec.sigmas.size())))
            throw ConfigError("simplified.rank: out of range for the given spectra");
        cfg.simplified = std::move(spec);
    } else {
        const auto& mesh = require(doc, "mesh", "config");
        cfg.radius_cm = require(mesh, "radius_cm", "mesh").get<double>();
        cfg.n_cells = require(mesh, "n_cells", "mesh").get<int>();
        if (!(cfg.radius_cm > 0.0)) throw ConfigError("mesh.radius_cm: must be positive");
        if (cfg.n_cells < 1) throw ConfigError("mesh.n_cells: must be positive");

        cfg.materials_file = require(doc, "materials_file", "config").get<std::string>();
        if (!base_dir.empty()) {
            std::filesystem::path p(cfg.materials_file);
            if (p.is_relative()) cfg.materials_file = (std::filesystem::path(base_dir) / p).string();
        }

        const auto& shells = require(doc, "shells", "config");
        if (!shells.is_array() || shells.empty())
            throw ConfigError("shells: expected a non-empty array");
        int index = 0;
        for (const auto& node : shells) {
            const std::string path = "shells[" + std::to_string(index++) + "]";
            Shell shell;
            shell.outer_radius_cm = require(node, "outer_radius_cm", path).get<double>();
            shell.material = require(node, "material", path).get<std::string>();
            cfg.shells.push_back(std::move(shell));
        }

        if (doc.contains("boundary")) {
            const std::string bc = doc.at("boundary").get<std::string>();
            if (bc == "zero_flux")
                cfg.boundary = BoundaryCondition::zero_flux;
            else if (bc == "reflective")
                cfg.boundary = BoundaryCondition::reflective;
            else
                throw ConfigError("boundary: expected 'zero_flux' or 'reflective'");
        }
    }

    if (doc.contains("outputs")) {
        const auto& outputs = doc.at("outputs");
        if (outputs.contains("directory"))
            cfg.out_directory = outputs.at("directory").get<std::string>();
        if (outputs.contains("emit_history"))
            cfg.emit_history = outputs.at("emit_history").get<bool>();
        if (outputs.contains("emit_modes"))
            cfg.emit_modes = outputs.at("emit_modes").get<bool>();
        if (outputs.contains("emit_flux")) cfg.emit_flux = outputs.at("emit_flux").get<bool>();
        if (outputs.contains("emit_memory"))
            cfg.emit_memory = outputs.at("emit_memory").get<bool>();
        if (outputs.contains("emit_timings"))
            cfg.emit_timings = outputs.at("emit_timings").get<bool>();
    }
    return cfg;
}

ProblemConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string canonical_config(const ProblemConfig& config) {
    ordered_json doc;
    if (config.mode != SolverMode::simplified) {
        doc["mesh"] = {{"radius_cm", config.radius_cm}, {"n_cells", config.n_cells}};
        doc["materials_file"] = config.materials_file;
        doc["shells"] = ordered_json::array();
        for (const auto& shell : config.shells)
            doc["shells"].push_back({{"outer_radius_cm", shell.outer_radius_cm},
                                     {"material", shell.material}});
        doc["boundary"] =
            config.boundary == BoundaryCondition::zero_flux ? "zero_flux" : "reflective";
    }

    ordered_json solver;
    solver["mode"] = to_string(config.mode);
    if (config.rank) solver["rank"] = *config.rank;
    if (config.theta) solver["theta"] = *config.theta;
    solver["r_min"] = config.r_min;
    if (config.r_max) solver["r_max"] = *config.r_max;
    solver["eps"] = config.eps;
    solver["max_iter"] = config.max_iter;
    solver["seed"] = config.seed;
    doc["solver"] = std::move(solver);

    if (config.simplified) {
        ordered_json simp;
        simp["lambdas"] = config.simplified->lambdas;
        simp["sigmas"] = config.simplified->sigmas;
        simp["seeds"] = config.simplified->seeds;
        simp["rank"] = config.simplified->rank;
        simp["identity_similarity"] = config.simplified->identity_similarity;
        doc["simplified"] = std::move(simp);
    }

    doc["outputs"] = {{"directory", config.out_directory},
                      {"emit_history", config.emit_history},
                      {"emit_modes", config.emit_modes},
                      {"emit_flux", config.emit_flux},
                      {"emit_memory", config.emit_memory},
                      {"emit_timings", config.emit_timings}};
    return doc.dump(2) + "\n";
}

}  // namespace dlrk
