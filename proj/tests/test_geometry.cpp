#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fpsi/geometry.hpp"

using namespace fpsi;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PlateField small_motion(const InterfaceGrid& g) {
    PlateField om = PlateField::Zero(g);
    om.c[0][0] = 0.01;
    om.c[0][1] = 0.03;   // cos z
    om.c[1][2] = -0.02;  // sin z
    om.c[1][5] = 0.015;  // cos 3z -> index 2*3-1
    return om;
}

}  // namespace

TEST_CASE("deformation gradient matches finite differences of the field") {
    Mesh2D mesh = build_disk_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    Eigen::VectorXd eta(2 * p1.ndof);
    for (int i = 0; i < p1.ndof; ++i) {
        const Eigen::Vector2d& x = p1.dof_xy[i];
        eta[2 * i] = 0.05 * std::sin(x.x()) * x.y();
        eta[2 * i + 1] = 0.04 * x.x() * x.x() - 0.03 * x.y();
    }
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> re(0, mesh.num_tris() - 1);
    const double step = 1e-6;
    for (int k = 0; k < 30; ++k) {
        int e = static_cast<int>(re(rng));
        Eigen::Vector2d c = (mesh.nodes[mesh.tris[e][0]] + mesh.nodes[mesh.tris[e][1]] +
                             mesh.nodes[mesh.tris[e][2]]) /
                            3.0;
        if (c.norm() > 0.9) continue;  // keep the stencil inside the mesh
        Eigen::Matrix2d g = def_gradient(p1, eta, e);
        for (int j = 0; j < 2; ++j) {
            Eigen::Vector2d dx = Eigen::Vector2d::Zero();
            dx[j] = step;
            Eigen::Vector2d fd =
                (p1.eval_vector(eta, c + dx) - p1.eval_vector(eta, c - dx)) / (2.0 * step);
            CHECK(std::abs(fd.x() - g(0, j)) <= 1e-6);
            CHECK(std::abs(fd.y() - g(1, j)) <= 1e-6);
        }
    }
}

TEST_CASE("transformed gradient solves F^T g = grad") {
    Eigen::Matrix2d f;
    f << 1.2, 0.1, -0.05, 0.9;
    Eigen::Vector2d grad{0.3, -0.7};
    Eigen::Vector2d tg = transformed_grad(f, grad);
    CHECK((f.transpose() * tg - grad).norm() <= 1e-14);
}

TEST_CASE("ALE map interpolates the interface motion and fixes the outer wall") {
    Mesh2D mesh = build_annulus_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    InterfaceGrid g = build_interface_grid(64, 8);
    PlateField om = small_motion(g);
    ALEMap phi = solve_ale_map(p1, g, om);

    for (const auto& be : mesh.bedges) {
        const Eigen::Vector2d& x = mesh.nodes[be.a];
        Eigen::Vector2d mapped = phi.at_node(be.a);
        if (be.tag == BoundaryTag::Outer) {
            CHECK((mapped - x).norm() <= 1e-12);
        } else {
            double z = std::atan2(x.y(), x.x());
            if (z < 0) z += kTwoPi;
            Eigen::Vector2d want{x.x() + fourier_eval_at(g, om.c[0], z),
                                 x.y() + fourier_eval_at(g, om.c[1], z)};
            CHECK((mapped - want).norm() <= 1e-12);
        }
    }
}

TEST_CASE("ALE extension is discretely harmonic in the interior") {
    Mesh2D mesh = build_annulus_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    InterfaceGrid g = build_interface_grid(64, 8);
    ALEMap phi = solve_ale_map(p1, g, small_motion(g));

    Eigen::SparseMatrix<double> k = assemble_stiffness(p1, tri_rule_deg2());
    std::vector<bool> bdry(p1.ndof, false);
    for (const auto& be : mesh.bedges) bdry[be.a] = bdry[be.b] = true;
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd comp(p1.ndof);
        for (int i = 0; i < p1.ndof; ++i) comp[i] = phi.vals[2 * i + c];
        Eigen::VectorXd res = k * comp;
        for (int i = 0; i < p1.ndof; ++i)
            if (!bdry[i]) CHECK(std::abs(res[i]) <= 1e-10);
    }
}

TEST_CASE("interface frame matches the analytic curve derivative") {
    InterfaceGrid g = build_interface_grid(32, 5);
    PlateField om = small_motion(g);
    InterfaceFrame fr = interface_frame(g, om);
    for (int j = 0; j < g.M; ++j) {
        double z = g.z[j];
        // independent per-mode derivative evaluation
        auto dcomp = [&](const Eigen::VectorXd& c) {
            double v = 0.0;
            for (int m = 1; m <= g.K; ++m)
                v += -m * c[2 * m - 1] * std::sin(m * z) + m * c[2 * m] * std::cos(m * z);
            return v;
        };
        double tx = -std::sin(z) + dcomp(om.c[0]);
        double ty = std::cos(z) + dcomp(om.c[1]);
        CHECK(std::abs(fr.tx[j] - tx) <= 1e-10);
        CHECK(std::abs(fr.ty[j] - ty) <= 1e-10);
        CHECK(std::abs(fr.nx[j] - ty) <= 1e-10);
        CHECK(std::abs(fr.ny[j] + tx) <= 1e-10);
        CHECK(fr.S[j] == doctest::Approx(std::hypot(tx, ty)).epsilon(1e-12));
    }
}

TEST_CASE("geometry certificate accepts the rest state with unit quantities") {
    Mesh2D dmesh = build_disk_mesh(1);
    Mesh2D amesh = build_annulus_mesh(1);
    FESpace dp1 = make_p1_space(dmesh);
    FESpace ap1 = make_p1_space(amesh);
    InterfaceGrid g = build_interface_grid(64, 8);
    PlateField om = PlateField::Zero(g);
    ALEMap phi = solve_ale_map(ap1, g, om);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(2 * dp1.ndof);
    GeomCertificate cert = certify_geometry(dp1, eta, phi, g, om, GeomThresholds{});
    CHECK(cert.pass);
    CHECK(cert.failure.empty());
    CHECK(cert.min_det_biot == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cert.min_jac_ale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cert.max_jac_ale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cert.alpha_tilde == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cert.max_interface_radius == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("geometry certificate rejects a collapsing deformation") {
    Mesh2D dmesh = build_disk_mesh(0);
    Mesh2D amesh = build_annulus_mesh(0);
    FESpace dp1 = make_p1_space(dmesh);
    FESpace ap1 = make_p1_space(amesh);
    InterfaceGrid g = build_interface_grid(32, 4);
    PlateField om = PlateField::Zero(g);
    ALEMap phi = solve_ale_map(ap1, g, om);
    Eigen::VectorXd eta(2 * dp1.ndof);
    for (int i = 0; i < dp1.ndof; ++i) {
        eta[2 * i] = -0.9 * dp1.dof_xy[i].x();  // strong compression
        eta[2 * i + 1] = -0.9 * dp1.dof_xy[i].y();
    }
    GeomCertificate cert = certify_geometry(dp1, eta, phi, g, om, GeomThresholds{});
    CHECK_FALSE(cert.pass);
    CHECK_FALSE(cert.failure.empty());
}

TEST_CASE("canonical annulus path is a metric-equivalent length") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> rd(1.0, 2.0), ang(0.0, kTwoPi);
    for (int k = 0; k < 2000; ++k) {
        Eigen::Vector2d a{rd(rng) * std::cos(ang(rng)), 0.0};
        double t = ang(rng);
        a = {a.norm() * std::cos(t), a.norm() * std::sin(t)};
        double t2 = ang(rng), r2 = rd(rng);
        Eigen::Vector2d b{r2 * std::cos(t2), r2 * std::sin(t2)};
        double len = annulus_path_length(a, b);
        double euclid = (a - b).norm();
        CHECK(len >= euclid - 1e-12);
        CHECK(len <= 5.0 * euclid + 1e-12);
    }
}

TEST_CASE("path polylines converge to the path length") {
    Eigen::Vector2d a{1.2, 0.0}, b{0.0, 1.8};
    double len = annulus_path_length(a, b);
    double l64 = polyline_length(annulus_path_polyline(a, b, 64));
    double l512 = polyline_length(annulus_path_polyline(a, b, 512));
    CHECK(std::abs(l512 - len) < std::abs(l64 - len) + 1e-14);
    CHECK(l512 == doctest::Approx(len).epsilon(1e-4));
    CHECK(l64 <= len + 1e-12);  // inscribed chords underestimate
}

TEST_CASE("identity map preserves polyline lengths and has unit gradient") {
    Mesh2D mesh = build_annulus_mesh(1);
    FESpace p1 = make_p1_space(mesh);
    Eigen::VectorXd id(2 * p1.ndof);
    for (int i = 0; i < p1.ndof; ++i) {
        id[2 * i] = p1.dof_xy[i].x();
        id[2 * i + 1] = p1.dof_xy[i].y();
    }
    CHECK(max_map_gradient(p1, id) == doctest::Approx(1.0).epsilon(1e-12));
    auto pts = annulus_path_polyline({1.1, 0.1}, {-1.3, 0.9}, 128);
    CHECK(mapped_polyline_length(p1, id, pts) ==
          doctest::Approx(polyline_length(pts)).epsilon(1e-12));
}
