#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fpsi/interface_grid.hpp"

using namespace fpsi;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("grid construction validates its arguments") {
    CHECK_THROWS(build_interface_grid(3, 1));
    CHECK_THROWS(build_interface_grid(16, 0));
    CHECK_THROWS(build_interface_grid(16, 9));
    InterfaceGrid g = build_interface_grid(16, 8);
    CHECK(g.ncoef() == 17);
    CHECK(g.z[3] == doctest::Approx(3.0 * kTwoPi / 16).epsilon(1e-15));
}

TEST_CASE("project after evaluate is the identity on the truncated space") {
    InterfaceGrid g = build_interface_grid(32, 10);
    std::mt19937 rng(3);
    std::normal_distribution<double> nd;
    Eigen::VectorXd c(g.ncoef());
    for (int i = 0; i < g.ncoef(); ++i) c[i] = nd(rng);
    Eigen::VectorXd back = fourier_project(g, fourier_evaluate(g, c));
    CHECK((back - c).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("derivatives act mode by mode") {
    InterfaceGrid g = build_interface_grid(64, 6);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(g.ncoef());
    c[2 * 3 - 1] = 2.0;  // 2 cos(3z)
    c[2 * 5] = -1.5;     // -1.5 sin(5z)
    Eigen::VectorXd d1 = fourier_derivative(g, c);
    Eigen::VectorXd d2 = fourier_second_derivative(g, c);
    for (double z : {0.3, 1.1, 4.0}) {
        double want1 = -6.0 * std::sin(3 * z) - 7.5 * std::cos(5 * z);
        double want2 = -18.0 * std::cos(3 * z) + 37.5 * std::sin(5 * z);
        CHECK(fourier_eval_at(g, d1, z) == doctest::Approx(want1).epsilon(1e-13));
        CHECK(fourier_eval_at(g, d2, z) == doctest::Approx(want2).epsilon(1e-13));
    }
}

TEST_CASE("Parseval inner product matches the trapezoid rule below the alias limit") {
    InterfaceGrid g = build_interface_grid(64, 20);  // 2K < M
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    Eigen::VectorXd c1(g.ncoef()), c2(g.ncoef());
    for (int i = 0; i < g.ncoef(); ++i) {
        c1[i] = nd(rng);
        c2[i] = nd(rng);
    }
    Eigen::VectorXd s1 = fourier_evaluate(g, c1), s2 = fourier_evaluate(g, c2);
    double trap = (kTwoPi / g.M) * s1.dot(s2);
    CHECK(fourier_inner(g, c1, c2) == doctest::Approx(trap).epsilon(1e-12));
}

TEST_CASE("matrix forms agree with the function forms") {
    InterfaceGrid g = build_interface_grid(24, 7);
    std::mt19937 rng(9);
    std::normal_distribution<double> nd;
    Eigen::VectorXd c(g.ncoef());
    for (int i = 0; i < g.ncoef(); ++i) c[i] = nd(rng);
    Eigen::VectorXd samples = fourier_evaluation_matrix(g) * c;
    CHECK((samples - fourier_evaluate(g, c)).cwiseAbs().maxCoeff() <= 1e-13);
    Eigen::VectorXd proj = fourier_projection_matrix(g) * samples;
    CHECK((proj - c).cwiseAbs().maxCoeff() <= 1e-12);

    Eigen::VectorXd mc = fourier_mass_diagonal(g);
    CHECK(mc[0] == doctest::Approx(kTwoPi).epsilon(1e-15));
    for (int i = 1; i < g.ncoef(); ++i)
        CHECK(mc[i] == doctest::Approx(0.5 * kTwoPi).epsilon(1e-15));
    CHECK(fourier_inner(g, c, c) == doctest::Approx(c.dot(mc.cwiseProduct(c))).epsilon(1e-13));
}

TEST_CASE("plate field helpers") {
    InterfaceGrid g = build_interface_grid(32, 4);
    PlateField f = PlateField::Zero(g);
    f.c[0][1] = 1.0;  // cos z in component x
    f.c[1][4] = 2.0;  // sin(2z) in component y
    PlateField lap = plate_laplacian(g, f);
    CHECK(lap.c[0][1] == doctest::Approx(-1.0));
    CHECK(lap.c[1][4] == doctest::Approx(-8.0));
    for (int c = 0; c < 2; ++c)
        CHECK((lap.c[c] - fourier_second_derivative(g, f.c[c])).cwiseAbs().maxCoeff() <= 1e-15);

    PlateField sum = plate_axpy(2.0, f, f);  // 3 f
    CHECK(plate_l2norm2(g, sum) == doctest::Approx(9.0 * plate_l2norm2(g, f)).epsilon(1e-14));
    CHECK(plate_inner(g, f, sum) == doctest::Approx(3.0 * plate_l2norm2(g, f)).epsilon(1e-14));
}
