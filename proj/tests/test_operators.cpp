#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/SVD>

#include "dlrk/error.hpp"
#include "dlrk/operators.hpp"
#include "oracles.hpp"

using namespace dlrk;
using namespace dlrk::testing;

namespace {

MaterialLibrary one_group_library(double d, double st, double ss, double nsf, double chi) {
    MaterialLibrary lib;
    lib.materials.push_back(make_one_group_material("m", d, st, ss, nsf, chi));
    return lib;
}

}  // namespace

TEST_CASE("one-cell stencil is the boundary leakage entry") {
    const SpatialMesh mesh = build_spherical_mesh(1.0, 1);
    const MaterialLibrary lib = one_group_library(2.0, 1.0, 0.4, 0.9, 1.0);
    const DensityField density = build_density_field(mesh, lib, {{1.0, "m"}});
    const OperatorSet ops = assemble_operators(mesh, lib, density);

    REQUIRE(ops.pairs.size() == 1);
    const SpatialPair& pair = ops.pairs[0];
    // density factor 2 on the ghost face, per-group factor D/2 in m_diag
    const double expected = -2.0 * mesh.surfaces(1) / (mesh.dr * mesh.volumes(0));
    CHECK(pair.stencil.diag(0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(pair.m_diag(0) == doctest::Approx(1.0).epsilon(1e-14));  // 2*2/(2+2)
    // combined leakage coefficient equals D * S / (dr * V)
    CHECK(pair.stencil.diag(0) * pair.m_diag(0) ==
          doctest::Approx(-2.0 * mesh.surfaces(1) / (mesh.dr * mesh.volumes(0)))
              .epsilon(1e-14));
}

TEST_CASE("adjacent materials produce the harmonic-mean interface stencil") {
    const SpatialMesh mesh = build_spherical_mesh(2.0, 2);
    MaterialLibrary lib;
    lib.materials.push_back(make_one_group_material("a", 2.0, 1.0, 0.1, 0.0, 0.0));
    lib.materials.push_back(make_one_group_material("b", 6.0, 1.0, 0.1, 0.0, 0.0));
    const DensityField density = build_density_field(mesh, lib, {{1.0, "a"}, {2.0, "b"}});
    const OperatorSet ops = assemble_operators(mesh, lib, density);

    const SpatialPair* ab = ops.find_pair(0, 1);
    REQUIRE(ab != nullptr);
    CHECK(ab->m_diag(0) == doctest::Approx(1.5).epsilon(1e-14));  // 2*6/(2+6)
    const double density_factor = 2.0 * mesh.surfaces(1) / (mesh.dr * mesh.volumes(0));
    CHECK(ab->stencil.upper(0) == doctest::Approx(density_factor).epsilon(1e-14));
    // product equals the directly computed harmonic-mean stencil entry
    const double harmonic = 2.0 * 2.0 * 6.0 / (2.0 + 6.0);
    CHECK(ab->stencil.upper(0) * ab->m_diag(0) ==
          doctest::Approx(harmonic * mesh.surfaces(1) / (mesh.dr * mesh.volumes(0)))
              .epsilon(1e-14));
    // same-material pairs only couple cells inside one shell
    const SpatialPair* ba = ops.find_pair(1, 0);
    REQUIRE(ba != nullptr);
    CHECK(ba->stencil.lower(0) != 0.0);
    CHECK(ba->stencil.upper(0) == 0.0);
}

TEST_CASE("group-scaled stencil rows are conservative") {
    const auto fx = make_sphere_fixture(12, 4, 3, 21);
    for (int g = 0; g < 4; ++g) {
        Eigen::MatrixXd total = Eigen::MatrixXd::Zero(12, 12);
        for (const auto& pair : fx.ops.pairs)
            total += pair.m_diag(g) * pair.stencil.to_dense();
        // all rows except the outer boundary row sum to zero
        for (int j = 0; j + 1 < 12; ++j)
            CHECK(std::abs(total.row(j).sum()) < 1e-12 * total.cwiseAbs().maxCoeff());
        CHECK(total.row(11).sum() < 0.0);
    }

    // with a reflective boundary every row is conservative
    const auto fx_refl = make_sphere_fixture(12, 4, 3, 21, 10.0, false,
                                             BoundaryCondition::reflective);
    for (int g = 0; g < 4; ++g) {
        Eigen::MatrixXd total = Eigen::MatrixXd::Zero(12, 12);
        for (const auto& pair : fx_refl.ops.pairs)
            total += pair.m_diag(g) * pair.stencil.to_dense();
        for (int j = 0; j < 12; ++j)
            CHECK(std::abs(total.row(j).sum()) < 1e-12 * total.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("fission matrices factor as rank one") {
    const auto fx = make_sphere_fixture(10, 6, 2, 33);
    for (int l = 0; l < fx.ops.n_materials; ++l) {
        const Eigen::MatrixXd expected =
            fx.library.materials[l].nu_sigma_f * fx.library.materials[l].chi.transpose();
        CHECK((fx.ops.fission[l] - expected).norm() == 0.0);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(fx.ops.fission[l]);
        if (svd.singularValues()(0) > 0.0)
            CHECK(svd.singularValues()(1) <= 1e-12 * svd.singularValues()(0));
    }
}

TEST_CASE("apply_lhs scalar cases") {
    const SpatialMesh mesh = build_spherical_mesh(1.0, 1);
    const MaterialLibrary lib = one_group_library(1.0, 1.0, 0.4, 0.9, 1.0);
    const DensityField density = build_density_field(mesh, lib, {{1.0, "m"}});
    // reflective single cell: stencil map empty, pure removal balance
    const OperatorSet ops =
        assemble_operators(mesh, lib, density, BoundaryCondition::reflective);
    CHECK(ops.pairs.empty());

    CHECK(apply_lhs(ops, Eigen::MatrixXd::Zero(1, 1)).norm() == 0.0);
    const Eigen::MatrixXd out = apply_lhs(ops, Eigen::MatrixXd::Constant(1, 1, 2.0));
    CHECK(out(0, 0) == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("apply_fission special cases") {
    SUBCASE("non-fissile library gives zero") {
        const SpatialMesh mesh = build_spherical_mesh(1.0, 2);
        const MaterialLibrary lib = one_group_library(1.0, 1.0, 0.4, 0.0, 0.0);
        const DensityField density = build_density_field(mesh, lib, {{1.0, "m"}});
        const OperatorSet ops = assemble_operators(mesh, lib, density);
        CHECK(apply_fission(ops, Eigen::MatrixXd::Ones(2, 1)).norm() == 0.0);
    }

    SUBCASE("two-group hand balance") {
        const SpatialMesh mesh = build_spherical_mesh(1.0, 1);
        MaterialLibrary lib;
        Eigen::VectorXd d(2), st(2), nsf(2), chi(2);
        Eigen::MatrixXd ss(2, 2);
        d << 1.0, 1.0;
        st << 1.0, 1.0;
        ss << 0.3, 0.3, 0.0, 0.2;
        nsf << 0.5, 1.0;
        chi << 1.0, 0.0;
        lib.materials.push_back(make_material("m", d, st, ss, nsf, chi));
        const DensityField density = build_density_field(mesh, lib, {{1.0, "m"}});
        const OperatorSet ops = assemble_operators(mesh, lib, density);

        Eigen::MatrixXd phi(1, 2);
        phi << 1.0, 0.375;
        const Eigen::MatrixXd out = apply_fission(ops, phi);
        CHECK(out(0, 0) == doctest::Approx(0.875).epsilon(1e-14));
        CHECK(out(0, 1) == 0.0);
    }

    SUBCASE("flat flux reproduces chi-weighted production") {
        const auto fx = make_sphere_fixture(6, 5, 1, 3);
        const Eigen::MatrixXd out = apply_fission(fx.ops, Eigen::MatrixXd::Ones(6, 5));
        const MaterialRecord& mat = fx.library.materials[0];
        const double production = mat.nu_sigma_f.sum();
        for (int j = 0; j < 6; ++j)
            for (int g = 0; g < 5; ++g)
                CHECK(out(j, g) == doctest::Approx(mat.chi(g) * production).epsilon(1e-13));
    }
}

TEST_CASE("apply_lhs and apply_fission match the index-notation oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        const int n_cells = 3 + trial % 8;
        const int groups = 1 + trial % 8;
        const int n_mats = 1 + trial % 3;
        const auto bc = trial % 2 == 0 ? BoundaryCondition::zero_flux
                                       : BoundaryCondition::reflective;
        const auto fx = make_sphere_fixture(n_cells, groups, n_mats, 50 + trial, 8.0,
                                            false, bc);
        const Eigen::MatrixXd phi = random_matrix(n_cells, groups, rng);

        const Eigen::MatrixXd lhs = apply_lhs(fx.ops, phi);
        const Eigen::MatrixXd lhs_oracle =
            oracle_apply_lhs(fx.mesh, fx.library, fx.density, phi, bc);
        CHECK(rel_diff(lhs, lhs_oracle) < 1e-13);

        const Eigen::MatrixXd fis = apply_fission(fx.ops, phi);
        const Eigen::MatrixXd fis_oracle =
            oracle_apply_fission(fx.mesh, fx.library, fx.density, phi);
        CHECK(rel_diff(fis, fis_oracle) < 1e-13);
    }
}

TEST_CASE("only pairs coupling occupied adjacent shells are kept") {
    // three shells: materials 0|1|2 from the center out, so pairs (0,2) and
    // (2,0) never meet at a face and must not appear in the map
    const auto fx = make_sphere_fixture(12, 3, 3, 13);
    CHECK(fx.ops.find_pair(0, 2) == nullptr);
    CHECK(fx.ops.find_pair(2, 0) == nullptr);
    for (int m = 0; m < 3; ++m) CHECK(fx.ops.find_pair(m, m) != nullptr);
    CHECK(fx.ops.find_pair(0, 1) != nullptr);
    CHECK(fx.ops.find_pair(1, 0) != nullptr);
    for (const auto& pair : fx.ops.pairs) CHECK(!pair.stencil.is_zero());
}

TEST_CASE("shape and dimension errors") {
    const auto fx = make_sphere_fixture(5, 3, 1, 9);
    CHECK_THROWS_AS(apply_lhs(fx.ops, Eigen::MatrixXd::Zero(5, 4)), AssemblyError);
    CHECK_THROWS_AS(apply_fission(fx.ops, Eigen::MatrixXd::Zero(4, 3)), AssemblyError);

    DensityField bad;
    bad.rho = Eigen::MatrixXd::Ones(4, 1);
    CHECK_THROWS_AS(assemble_operators(fx.mesh, fx.library, bad), AssemblyError);
}
