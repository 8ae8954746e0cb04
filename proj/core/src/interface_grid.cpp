#include "fpsi/interface_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fpsi {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

InterfaceGrid build_interface_grid(int M, int K) {
    if (M < 4) throw std::runtime_error("interface grid: M must be >= 4");
    if (K < 1 || 2 * K > M) throw std::runtime_error("interface grid: require 1 <= K <= M/2");
    InterfaceGrid g;
    g.M = M;
    g.K = K;
    g.z.resize(M);
    for (int j = 0; j < M; ++j) g.z[j] = kTwoPi * j / M;
    return g;
}

Eigen::VectorXd fourier_project(const InterfaceGrid& g, const Eigen::VectorXd& samples) {
    if (samples.size() != g.M) throw std::runtime_error("fourier_project: sample count mismatch");
    Eigen::VectorXd c = Eigen::VectorXd::Zero(g.ncoef());
    c[0] = samples.sum() / g.M;
    for (int m = 1; m <= g.K; ++m) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j < g.M; ++j) {
            a += samples[j] * std::cos(m * g.z[j]);
            b += samples[j] * std::sin(m * g.z[j]);
        }
        double scale = (2 * m == g.M) ? 1.0 / g.M : 2.0 / g.M;
        c[2 * m - 1] = scale * a;
        c[2 * m] = (2 * m == g.M) ? 0.0 : scale * b;
    }
    return c;
}

double fourier_eval_at(const InterfaceGrid& g, const Eigen::VectorXd& coeffs, double z) {
    double v = coeffs[0];
    for (int m = 1; m <= g.K; ++m)
        v += coeffs[2 * m - 1] * std::cos(m * z) + coeffs[2 * m] * std::sin(m * z);
    return v;
}

Eigen::VectorXd fourier_evaluate(const InterfaceGrid& g, const Eigen::VectorXd& coeffs) {
    Eigen::VectorXd s(g.M);
    for (int j = 0; j < g.M; ++j) s[j] = fourier_eval_at(g, coeffs, g.z[j]);
    return s;
}

Eigen::VectorXd fourier_derivative(const InterfaceGrid& g, const Eigen::VectorXd& coeffs) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(g.ncoef());
    for (int m = 1; m <= g.K; ++m) {
        d[2 * m - 1] = m * coeffs[2 * m];
        d[2 * m] = -m * coeffs[2 * m - 1];
    }
    return d;
}

Eigen::VectorXd fourier_second_derivative(const InterfaceGrid& g, const Eigen::VectorXd& coeffs) {
    Eigen::VectorXd d = coeffs;
    d[0] = 0.0;
    for (int m = 1; m <= g.K; ++m) {
        d[2 * m - 1] *= -static_cast<double>(m) * m;
        d[2 * m] *= -static_cast<double>(m) * m;
    }
    return d;
}

double fourier_inner(const InterfaceGrid& g, const Eigen::VectorXd& c1, const Eigen::VectorXd& c2) {
    double v = kTwoPi * c1[0] * c2[0];
    for (int i = 1; i < g.ncoef(); ++i) v += 0.5 * kTwoPi * c1[i] * c2[i];
    return v;
}

Eigen::MatrixXd fourier_projection_matrix(const InterfaceGrid& g) {
    Eigen::MatrixXd f(g.ncoef(), g.M);
    for (int j = 0; j < g.M; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(g.M);
        e[j] = 1.0;
        f.col(j) = fourier_project(g, e);
    }
    return f;
}

Eigen::MatrixXd fourier_evaluation_matrix(const InterfaceGrid& g) {
    Eigen::MatrixXd v(g.M, g.ncoef());
    for (int j = 0; j < g.M; ++j) {
        v(j, 0) = 1.0;
        for (int m = 1; m <= g.K; ++m) {
            v(j, 2 * m - 1) = std::cos(m * g.z[j]);
            v(j, 2 * m) = std::sin(m * g.z[j]);
        }
    }
    return v;
}

Eigen::VectorXd fourier_mass_diagonal(const InterfaceGrid& g) {
    Eigen::VectorXd d(g.ncoef());
    d[0] = kTwoPi;
    for (int i = 1; i < g.ncoef(); ++i) d[i] = 0.5 * kTwoPi;
    return d;
}

PlateField PlateField::Zero(const InterfaceGrid& g) {
    PlateField f;
    f.c[0] = Eigen::VectorXd::Zero(g.ncoef());
    f.c[1] = Eigen::VectorXd::Zero(g.ncoef());
    return f;
}

double plate_l2norm2(const InterfaceGrid& g, const PlateField& f) {
    return fourier_inner(g, f.c[0], f.c[0]) + fourier_inner(g, f.c[1], f.c[1]);
}

double plate_inner(const InterfaceGrid& g, const PlateField& f, const PlateField& h) {
    return fourier_inner(g, f.c[0], h.c[0]) + fourier_inner(g, f.c[1], h.c[1]);
}

PlateField plate_axpy(double a, const PlateField& x, const PlateField& y) {
    PlateField f;
    f.c[0] = a * x.c[0] + y.c[0];
    f.c[1] = a * x.c[1] + y.c[1];
    return f;
}

PlateField plate_laplacian(const InterfaceGrid& g, const PlateField& f) {
    PlateField out;
    out.c[0] = fourier_second_derivative(g, f.c[0]);
    out.c[1] = fourier_second_derivative(g, f.c[1]);
    return out;
}

}  // namespace fpsi
