#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fpsi/fe_space.hpp"

using namespace fpsi;

namespace {

Eigen::Vector3d random_bary(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double a = u(rng), b = u(rng) * (1.0 - a);
    return {a, b, 1.0 - a - b};
}

}  // namespace

TEST_CASE("shape functions form a partition of unity") {
    Mesh2D mesh = build_annulus_mesh(0);
    FESpace p1 = make_p1_space(mesh);
    FESpace p2 = make_p2_space(mesh);
    std::mt19937 rng(11);
    for (int k = 0; k < 50; ++k) {
        Eigen::Vector3d b = random_bary(rng);
        CHECK(p1.shape(b).sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(p2.shape(b).sum() == doctest::Approx(1.0).epsilon(1e-14));
        auto gl = p2.grad_lambda(3);
        CHECK(p1.shape_grad(b, gl).colwise().sum().norm() <= 1e-12);
        CHECK(p2.shape_grad(b, gl).colwise().sum().norm() <= 1e-12);
    }
}

TEST_CASE("P2 interpolation reproduces quadratic polynomials") {
    Mesh2D mesh = build_annulus_mesh(1);
    FESpace p2 = make_p2_space(mesh);
    auto f = [](const Eigen::Vector2d& x) {
        return 3.0 * x.x() * x.x() - 2.0 * x.x() * x.y() + x.y() + 1.0;
    };
    Eigen::VectorXd coeffs(p2.ndof);
    for (int i = 0; i < p2.ndof; ++i) coeffs[i] = f(p2.dof_xy[i]);

    std::mt19937 rng(13);
    std::uniform_real_distribution<double> rd(1.05, 1.95), ang(0.0, 6.28);
    for (int k = 0; k < 200; ++k) {
        double r = rd(rng), th = ang(rng);
        Eigen::Vector2d x{r * std::cos(th), r * std::sin(th)};
        CHECK(p2.eval(coeffs, x) == doctest::Approx(f(x)).epsilon(1e-12));
    }
}

TEST_CASE("P1 interpolation reproduces affine vector fields") {
    Mesh2D mesh = build_disk_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    Eigen::VectorXd coeffs(2 * p1.ndof);
    for (int i = 0; i < p1.ndof; ++i) {
        const Eigen::Vector2d& x = p1.dof_xy[i];
        coeffs[2 * i] = 2.0 * x.x() - x.y() + 0.5;
        coeffs[2 * i + 1] = x.x() + 3.0 * x.y();
    }
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> rd(0.0, 0.95), ang(0.0, 6.28);
    for (int k = 0; k < 200; ++k) {
        double r = rd(rng), th = ang(rng);
        Eigen::Vector2d x{r * std::cos(th), r * std::sin(th)};
        Eigen::Vector2d v = p1.eval_vector(coeffs, x);
        CHECK(v.x() == doctest::Approx(2.0 * x.x() - x.y() + 0.5).epsilon(1e-12));
        CHECK(v.y() == doctest::Approx(x.x() + 3.0 * x.y()).epsilon(1e-12));
    }
}

TEST_CASE("mass matrix of the constant function integrates the area") {
    Mesh2D mesh = build_disk_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    FESpace p2 = make_p2_space(mesh);
    for (const FESpace* s : {&p1, &p2}) {
        Eigen::SparseMatrix<double> m = assemble_mass(*s, tri_rule_deg5());
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(s->ndof);
        CHECK(ones.dot(m * ones) == doctest::Approx(mesh.total_area()).epsilon(1e-12));
    }
}

TEST_CASE("stiffness matrix annihilates constants and is symmetric") {
    Mesh2D mesh = build_annulus_mesh(1);
    FESpace p2 = make_p2_space(mesh);
    Eigen::SparseMatrix<double> k = assemble_stiffness(p2, tri_rule_deg2());
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(p2.ndof);
    CHECK((k * ones).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SparseMatrix<double> diff = Eigen::SparseMatrix<double>(k.transpose()) - k;
    CHECK(diff.coeffs().cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("quadrature rules agree with a refined composite oracle") {
    // integrate a degree-5 polynomial over a physical triangle
    Mesh2D mesh = build_annulus_mesh(0);
    FESpace p1 = make_p1_space(mesh);
    auto poly = [](const Eigen::Vector2d& x) {
        return std::pow(x.x(), 5) - 2.0 * std::pow(x.x(), 2) * std::pow(x.y(), 3) + x.y() + 0.7;
    };
    QuadRule oracle = tri_rule_refined(8, tri_rule_deg5());
    for (int e : {0, 5, 17}) {
        const auto& t = mesh.tris[e];
        auto at = [&](const Eigen::Vector3d& b) {
            Eigen::Vector2d x = b[0] * mesh.nodes[t[0]] + b[1] * mesh.nodes[t[1]] +
                                b[2] * mesh.nodes[t[2]];
            return poly(x);
        };
        double exact = 0.0, coarse = 0.0;
        for (int q = 0; q < oracle.size(); ++q) exact += oracle.w[q] * at(oracle.bary[q]);
        const QuadRule& r5 = tri_rule_deg5();
        for (int q = 0; q < r5.size(); ++q) coarse += r5.w[q] * at(r5.bary[q]);
        CHECK(coarse == doctest::Approx(exact).epsilon(1e-13));
    }
    (void)p1;
}

TEST_CASE("free index construction") {
    std::vector<int> free_index;
    int n = build_free_index(6, {1, 4}, free_index);
    CHECK(n == 4);
    CHECK(free_index == std::vector<int>{0, -1, 1, 2, -1, 3});
}

TEST_CASE("boundary dofs carry their tags") {
    Mesh2D mesh = build_annulus_mesh(0);
    FESpace p2 = make_p2_space(mesh);
    auto inner = p2.boundary_dofs(BoundaryTag::Interface);
    auto outer = p2.boundary_dofs(BoundaryTag::Outer);
    CHECK(inner.size() == 2u * 12u);  // vertices plus midsides of 12 edges
    CHECK(outer.size() == 2u * 12u);
    for (int d : inner) CHECK(p2.dof_xy[d].norm() <= 1.0 + 1e-12);
    for (int d : outer) CHECK(p2.dof_xy[d].norm() >= 2.0 * std::cos(std::numbers::pi / 12) - 1e-12);
}
