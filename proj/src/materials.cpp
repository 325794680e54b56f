#include "dlrk/materials.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dlrk/error.hpp"
#include "dlrk/mesh.hpp"

namespace dlrk {

using nlohmann::json;

namespace {

Eigen::VectorXd read_vector(const json& node, const std::string& path, int expected) {
    if (!node.is_array())
        throw ConfigError(path + ": expected an array");
    if (expected >= 0 && static_cast<int>(node.size()) != expected)
        throw ConfigError(path + ": group count mismatch (expected " +
                          std::to_string(expected) + " entries, got " +
                          std::to_string(node.size()) + ")");
    Eigen::VectorXd v(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_number())
            throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
        v(static_cast<Eigen::Index>(i)) = node[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd read_matrix(const json& node, const std::string& path, int rows, int cols) {
    if (!node.is_array() || static_cast<int>(node.size()) != rows)
        throw ConfigError(path + ": group count mismatch (expected " + std::to_string(rows) +
                          " rows)");
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        m.row(r) = read_vector(node[r], path + "[" + std::to_string(r) + "]", cols).transpose();
    return m;
}

void require_nonnegative(const Eigen::VectorXd& v, const std::string& path) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v(i) < 0.0)
            throw ConfigError(path + "[" + std::to_string(i) + "]: negative cross section");
}

MaterialRecord parse_material(const json& node, int groups, const std::string& path) {
    for (const char* key : {"name", "diffusion", "sigma_t", "sigma_s", "nu_sigma_f", "chi"})
        if (!node.contains(key))
            throw ConfigError(path + ": missing field '" + std::string(key) + "'");

    MaterialRecord mat;
    mat.name = node.at("name").get<std::string>();
    mat.diffusion = read_vector(node.at("diffusion"), path + ".diffusion", groups);
    mat.sigma_t = read_vector(node.at("sigma_t"), path + ".sigma_t", groups);
    mat.sigma_s = read_matrix(node.at("sigma_s"), path + ".sigma_s", groups, groups);
    mat.nu_sigma_f = read_vector(node.at("nu_sigma_f"), path + ".nu_sigma_f", groups);
    mat.chi = read_vector(node.at("chi"), path + ".chi", groups);

    for (Eigen::Index g = 0; g < groups; ++g)
        if (!(mat.diffusion(g) > 0.0))
            throw ConfigError(path + ".diffusion[" + std::to_string(g) +
                              "]: diffusion coefficient must be positive");
    require_nonnegative(mat.sigma_t, path + ".sigma_t");
    require_nonnegative(mat.nu_sigma_f, path + ".nu_sigma_f");
    require_nonnegative(mat.chi, path + ".chi");
    for (int r = 0; r < groups; ++r)
        require_nonnegative(mat.sigma_s.row(r).transpose(), path + ".sigma_s[" + std::to_string(r) + "]");

    const double chi_sum = mat.chi.sum();
    const bool chi_zero = mat.chi.maxCoeff() == 0.0 && groups > 0;
    if (!chi_zero && std::abs(chi_sum - 1.0) > 1e-10)
        throw ConfigError(path + ".chi: chi not normalized (sums to " +
                          std::to_string(chi_sum) + ")");
    return mat;
}

}  // namespace

int MaterialLibrary::find(const std::string& name) const {
    for (int i = 0; i < n_materials(); ++i)
        if (materials[i].name == name) return i;
    return -1;
}

int DensityField::material_of(int j) const {
    for (int l = 0; l < n_materials(); ++l)
        if (rho(j, l) == 1.0) return l;
    return -1;
}

MaterialLibrary load_material_library(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("material library: ") + e.what());
    }

    if (!doc.contains("groups") || !doc.at("groups").is_number_integer())
        throw ConfigError("groups: required positive integer");
    const int groups = doc.at("groups").get<int>();
    if (groups < 1)
        throw ConfigError("groups: must be at least 1");

    if (!doc.contains("materials") || !doc.at("materials").is_array() ||
        doc.at("materials").empty())
        throw ConfigError("materials: required non-empty list");

    MaterialLibrary lib;
    int index = 0;
    for (const auto& node : doc.at("materials")) {
        const std::string path = "materials[" + std::to_string(index) + "]";
        lib.materials.push_back(parse_material(node, groups, path));
        for (int i = 0; i + 1 < static_cast<int>(lib.materials.size()); ++i)
            if (lib.materials[i].name == lib.materials.back().name)
                throw ConfigError(path + ".name: duplicate material name '" +
                                  lib.materials.back().name + "'");
        ++index;
    }

    if (doc.contains("energy_edges_ev")) {
        EnergyGrid grid;
        grid.n_groups = groups;
        grid.edges = read_vector(doc.at("energy_edges_ev"), "energy_edges_ev", groups + 1);
        grid.widths.resize(groups);
        for (int g = 0; g < groups; ++g) {
            grid.widths(g) = grid.edges(g) - grid.edges(g + 1);
            if (!(grid.widths(g) > 0.0))
                throw ConfigError("energy_edges_ev: edges must be strictly decreasing");
        }
        lib.energy_grid = std::move(grid);
    }
    return lib;
}

MaterialLibrary load_material_library_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("material library: cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_material_library(buf.str());
}

std::string material_library_to_json(const MaterialLibrary& library) {
    nlohmann::ordered_json doc;
    doc["groups"] = library.n_groups();
    if (library.energy_grid) {
        auto& edges = doc["energy_edges_ev"] = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < library.energy_grid->edges.size(); ++i)
            edges.push_back(library.energy_grid->edges(i));
    }
    auto& materials = doc["materials"] = nlohmann::ordered_json::array();
    for (const auto& mat : library.materials) {
        nlohmann::ordered_json node;
        node["name"] = mat.name;
        auto vector_of = [](const Eigen::VectorXd& v) {
            return std::vector<double>(v.data(), v.data() + v.size());
        };
        node["diffusion"] = vector_of(mat.diffusion);
        node["sigma_t"] = vector_of(mat.sigma_t);
        auto& rows = node["sigma_s"] = nlohmann::ordered_json::array();
        for (int r = 0; r < mat.n_groups(); ++r)
            rows.push_back(vector_of(mat.sigma_s.row(r).transpose()));
        node["nu_sigma_f"] = vector_of(mat.nu_sigma_f);
        node["chi"] = vector_of(mat.chi);
        materials.push_back(std::move(node));
    }
    return doc.dump(2) + "\n";
}

DensityField build_density_field(const SpatialMesh& mesh, const MaterialLibrary& library,
                                 const std::vector<Shell>& shells) {
    if (shells.empty())
        throw ConfigError("shells: at least one shell required");

    double previous = 0.0;
    for (std::size_t s = 0; s < shells.size(); ++s) {
        if (!(shells[s].outer_radius_cm > previous))
            throw ConfigError("shells[" + std::to_string(s) + "]: shell radii not increasing");
        previous = shells[s].outer_radius_cm;
        if (library.find(shells[s].material) < 0)
            throw ConfigError("shells[" + std::to_string(s) + "]: unknown material '" +
                              shells[s].material + "'");
    }
    const double r_total = mesh.total_radius();
    if (std::abs(shells.back().outer_radius_cm - r_total) > 1e-9 * r_total)
        throw ConfigError("shells: outermost radius " +
                          std::to_string(shells.back().outer_radius_cm) +
                          " does not cover mesh radius " + std::to_string(r_total));

    DensityField density;
    density.rho = Eigen::MatrixXd::Zero(mesh.n_cells, library.n_materials());
    for (int j = 0; j < mesh.n_cells; ++j) {
        const double r = mesh.centers(j);
        int shell = 0;
        while (shell < static_cast<int>(shells.size()) - 1 &&
               r > shells[shell].outer_radius_cm)
            ++shell;
        density.rho(j, library.find(shells[shell].material)) = 1.0;
    }
    return density;
}

double interface_diffusion_factor(double d_l, double d_k) {
    if (!(d_l > 0.0) || !(d_k > 0.0))
        throw ConfigError("interface_diffusion_factor: diffusion coefficients must be positive");
    return d_l * d_k / (d_l + d_k);
}

}  // namespace dlrk
