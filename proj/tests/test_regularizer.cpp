#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fpsi/regularizer.hpp"

using namespace fpsi;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Independent kernel-quadrature row: same midpoint polar grid and clamp, but
// point location by exhaustive triangle scan instead of the structured lookup.
Eigen::VectorXd brute_row(const FESpace& p1, double delta, const Eigen::Vector2d& x, int nr,
                          int nt) {
    Mollifier phi(delta);
    const Mesh2D& mesh = *p1.mesh;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(p1.ndof);
    double mass = 0.0;
    for (int i = 0; i < nr; ++i) {
        double rho = (i + 0.5) * delta / nr;
        double w = phi.value({rho, 0.0}) * rho * (delta / nr) * (kTwoPi / nt);
        if (w == 0.0) continue;
        for (int j = 0; j < nt; ++j) {
            double th = (j + 0.5) * kTwoPi / nt;
            Eigen::Vector2d y = x + rho * Eigen::Vector2d{std::cos(th), std::sin(th)};
            if (y.norm() > 1.0) y /= y.norm();
            int best = -1;
            double best_min = -1e300;
            for (int e = 0; e < mesh.num_tris(); ++e) {
                Eigen::Vector3d b = mesh.barycentric(e, y);
                double worst = b.minCoeff();
                if (worst > best_min) {
                    best_min = worst;
                    best = e;
                }
            }
            Eigen::Vector3d b = mesh.barycentric(best, y);
            for (int k = 0; k < 3; ++k) b[k] = std::max(b[k], 0.0);
            b /= b.sum();
            for (int k = 0; k < 3; ++k) row[p1.elem_dofs[best][k]] += w * b[k];
            mass += w;
        }
    }
    return row / mass;
}

}  // namespace

TEST_CASE("mollifier has unit mass and compact support") {
    Mollifier phi(0.3);
    CHECK(phi.value({0.31, 0.0}) == 0.0);
    CHECK(phi.value({0.0, 0.0}) > 0.0);
    // radial midpoint integration against a much finer grid
    const int n = 200000;
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = (i + 0.5) * 0.3 / n;
        mass += phi.value({r, 0.0}) * r * (0.3 / n) * kTwoPi;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(Mollifier(0.0));
    CHECK_THROWS(Mollifier(0.6));
}

TEST_CASE("build rejects an undersized kernel grid") {
    Mesh2D mesh = build_disk_mesh(0);
    FESpace p1 = make_p1_space(mesh);
    InterfaceGrid g = build_interface_grid(32, 4);
    CHECK_THROWS(build_regularizer(p1, g, 0.3, 8, 16));
    CHECK_THROWS(build_regularizer(p1, g, 0.3, 16, 8));
}

TEST_CASE("constants are reproduced exactly on all three sample sets") {
    Mesh2D mesh = build_disk_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    InterfaceGrid g = build_interface_grid(64, 8);
    RegularizationOperator reg = build_regularizer(p1, g, 0.3);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(p1.ndof);
    CHECK(((reg.S_nodes * ones).array() - 1.0).abs().maxCoeff() <= 1e-13);
    CHECK(((reg.S_quad * ones).array() - 1.0).abs().maxCoeff() <= 1e-13);
    CHECK(((reg.S_gamma * ones).array() - 1.0).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("affine fields pass through in the interior") {
    Mesh2D mesh = build_disk_mesh(2);
    FESpace p1 = make_p1_space(mesh);
    InterfaceGrid g = build_interface_grid(64, 8);
    const double delta = 0.25;
    RegularizationOperator reg = build_regularizer(p1, g, delta);
    Eigen::VectorXd f(p1.ndof);
    for (int i = 0; i < p1.ndof; ++i) f[i] = 0.7 * p1.dof_xy[i].x() - 1.3 * p1.dof_xy[i].y() + 0.2;
    Eigen::VectorXd sf = reg.S_nodes * f;
    int tested = 0;
    for (int i = 0; i < p1.ndof; ++i) {
        if (p1.dof_xy[i].norm() > 1.0 - delta - 0.05) continue;
        CHECK(std::abs(sf[i] - f[i]) <= 1e-8);
        ++tested;
    }
    CHECK(tested > 50);
}

TEST_CASE("operator rows match the exhaustive-search oracle") {
    Mesh2D mesh = build_disk_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    InterfaceGrid g = build_interface_grid(32, 4);
    const double delta = 0.3;
    RegularizationOperator reg = build_regularizer(p1, g, delta);

    std::mt19937 rng(41);
    std::uniform_int_distribution<int> pick(0, p1.ndof - 1);
    for (int k = 0; k < 10; ++k) {
        int r = pick(rng);
        Eigen::VectorXd want = brute_row(p1, delta, p1.dof_xy[r], 16, 16);
        Eigen::VectorXd got = Eigen::VectorXd(reg.S_nodes.row(r).transpose());
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10);
    }
    for (int j = 0; j < g.M; j += 5) {
        Eigen::Vector2d x{std::cos(g.z[j]), std::sin(g.z[j])};
        Eigen::VectorXd want = brute_row(p1, delta, x, 16, 16);
        Eigen::VectorXd got = Eigen::VectorXd(reg.S_gamma.row(j).transpose());
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("application is exactly homogeneous and additive") {
    Mesh2D mesh = build_disk_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    InterfaceGrid g = build_interface_grid(32, 4);
    RegularizationOperator reg = build_regularizer(p1, g, 0.3);
    std::mt19937 rng(43);
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(2 * p1.ndof), w(2 * p1.ndof);
    for (int i = 0; i < 2 * p1.ndof; ++i) {
        v[i] = nd(rng);
        w[i] = nd(rng);
    }
    Eigen::VectorXd sv = regularize_nodal(reg, v);
    // scaling by powers of two commutes bitwise with the row sums
    CHECK((regularize_nodal(reg, 4.0 * v) - 4.0 * sv).cwiseAbs().maxCoeff() == 0.0);
    CHECK((regularize_nodal(reg, 0.5 * v) - 0.5 * sv).cwiseAbs().maxCoeff() == 0.0);
    Eigen::VectorXd sum = regularize_nodal(reg, v + w);
    Eigen::VectorXd split = sv + regularize_nodal(reg, w);
    double scale = std::max(1.0, split.cwiseAbs().maxCoeff());
    CHECK((sum - split).cwiseAbs().maxCoeff() <= 1e-13 * scale);
}

TEST_CASE("trace operator agrees with the sample-then-project path") {
    Mesh2D mesh = build_disk_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    InterfaceGrid g = build_interface_grid(64, 8);
    RegularizationOperator reg = build_regularizer(p1, g, 0.3);
    Eigen::MatrixXd r = trace_operator(reg);
    std::mt19937 rng(47);
    std::normal_distribution<double> nd;
    Eigen::VectorXd eta(2 * p1.ndof);
    for (int i = 0; i < 2 * p1.ndof; ++i) eta[i] = nd(rng);
    PlateField tr = regularized_trace(reg, eta);
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd comp(p1.ndof);
        for (int d = 0; d < p1.ndof; ++d) comp[d] = eta[2 * d + c];
        CHECK((r * comp - tr.c[c]).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("standalone row helper matches the assembled operator") {
    Mesh2D mesh = build_disk_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    InterfaceGrid g = build_interface_grid(32, 4);
    RegularizationOperator reg = build_regularizer(p1, g, 0.3);
    for (int r : {0, 7, 42}) {
        Eigen::VectorXd row = regularizer_row(p1, 0.3, p1.dof_xy[r], 16, 16);
        Eigen::VectorXd got = Eigen::VectorXd(reg.S_nodes.row(r).transpose());
        CHECK((row - got).cwiseAbs().maxCoeff() <= 1e-14);
    }
}
