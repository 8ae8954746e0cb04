#include "fpsi/regularizer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fpsi {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Mollifier::Mollifier(double delta_) : delta(delta_) {
    if (delta <= 0.0 || delta > 0.5) throw std::runtime_error("mollifier: require 0 < delta <= 0.5");
    // Unit mass: C * 2*pi * int_0^1 exp(-1/(1-r^2)) r dr = 1.
    const int n = 4000;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = (i + 0.5) / n;
        integral += std::exp(-1.0 / (1.0 - r * r)) * r / n;
    }
    C = 1.0 / (kTwoPi * integral);
}

double Mollifier::value(const Eigen::Vector2d& r) const {
    double s2 = r.squaredNorm() / (delta * delta);
    if (s2 >= 1.0) return 0.0;
    return C / (delta * delta) * std::exp(-1.0 / (1.0 - s2));
}

namespace {

/// Accumulate the (unnormalized) kernel-quadrature row into `row`; returns
/// the accumulated kernel mass. Kernel points outside the unit disk are
/// clamped to the boundary circle (the strong 1-extension).
double accumulate_row(const FESpace& p1, const Mollifier& phi, const Eigen::Vector2d& x, int nr,
                      int nt, Eigen::VectorXd& row) {
    const Mesh2D& mesh = *p1.mesh;
    const double dr = phi.delta / nr;
    const double dth = kTwoPi / nt;
    double mass = 0.0;
    for (int i = 0; i < nr; ++i) {
        double rho = (i + 0.5) * dr;
        double w_r = phi.value({rho, 0.0}) * rho * dr * dth;
        if (w_r == 0.0) continue;
        for (int j = 0; j < nt; ++j) {
            double th = (j + 0.5) * dth;
            Eigen::Vector2d y = x + rho * Eigen::Vector2d{std::cos(th), std::sin(th)};
            double ry = y.norm();
            if (ry > 1.0) y /= ry;
            int e = mesh.locate(y);
            if (e < 0) throw std::runtime_error("regularizer: kernel point outside mesh");
            Eigen::Vector3d b = mesh.barycentric(e, y);
            for (int k = 0; k < 3; ++k) b[k] = std::max(b[k], 0.0);
            b /= b.sum();
            for (int k = 0; k < 3; ++k) row[p1.elem_dofs[e][k]] += w_r * b[k];
            mass += w_r;
        }
    }
    return mass;
}

}  // namespace

Eigen::VectorXd regularizer_row(const FESpace& disk_p1, double delta, const Eigen::Vector2d& x,
                                int nr, int nt) {
    Mollifier phi(delta);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(disk_p1.ndof);
    double mass = accumulate_row(disk_p1, phi, x, nr, nt, row);
    return row / mass;
}

RegularizationOperator build_regularizer(const FESpace& disk_p1, const InterfaceGrid& grid,
                                         double delta, int kernel_nr, int kernel_nt) {
    if (kernel_nr < 16 || kernel_nt < 16)
        throw std::runtime_error("regularizer: kernel grid must be at least 16x16");
    RegularizationOperator reg;
    reg.disk_p1 = &disk_p1;
    reg.grid = &grid;
    reg.delta = delta;
    reg.kernel_nr = kernel_nr;
    reg.kernel_nt = kernel_nt;

    const Mollifier phi(delta);
    const int nd = disk_p1.ndof;

    auto build_block = [&](const std::vector<Eigen::Vector2d>& pts) {
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::VectorXd row(nd);
        for (size_t r = 0; r < pts.size(); ++r) {
            row.setZero();
            double mass = accumulate_row(disk_p1, phi, pts[r], kernel_nr, kernel_nt, row);
            for (int d = 0; d < nd; ++d)
                if (row[d] != 0.0) trip.emplace_back(static_cast<int>(r), d, row[d] / mass);
        }
        Eigen::SparseMatrix<double, Eigen::RowMajor> m(static_cast<int>(pts.size()), nd);
        m.setFromTriplets(trip.begin(), trip.end());
        return m;
    };

    reg.S_nodes = build_block(disk_p1.dof_xy);

    const Mesh2D& mesh = *disk_p1.mesh;
    const QuadRule& rule = tri_rule_deg2();
    reg.quad_pts.reserve(mesh.num_tris() * rule.size());
    for (int e = 0; e < mesh.num_tris(); ++e) {
        const auto& t = mesh.tris[e];
        for (int q = 0; q < rule.size(); ++q) {
            const Eigen::Vector3d& b = rule.bary[q];
            reg.quad_pts.push_back(b[0] * mesh.nodes[t[0]] + b[1] * mesh.nodes[t[1]] +
                                   b[2] * mesh.nodes[t[2]]);
        }
    }
    reg.S_quad = build_block(reg.quad_pts);

    std::vector<Eigen::Vector2d> gamma_pts(grid.M);
    for (int j = 0; j < grid.M; ++j)
        gamma_pts[j] = {std::cos(grid.z[j]), std::sin(grid.z[j])};
    reg.S_gamma = build_block(gamma_pts);

    return reg;
}

Eigen::VectorXd regularize_nodal(const RegularizationOperator& reg, const Eigen::VectorXd& eta) {
    const int nd = reg.disk_p1->ndof;
    Eigen::VectorXd comp(nd), out(2 * nd);
    for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < nd; ++d) comp[d] = eta[2 * d + c];
        Eigen::VectorXd r = reg.S_nodes * comp;
        for (int d = 0; d < nd; ++d) out[2 * d + c] = r[d];
    }
    return out;
}

PlateField regularized_trace(const RegularizationOperator& reg, const Eigen::VectorXd& eta) {
    const int nd = reg.disk_p1->ndof;
    Eigen::VectorXd comp(nd);
    PlateField f;
    for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < nd; ++d) comp[d] = eta[2 * d + c];
        f.c[c] = fourier_project(*reg.grid, reg.S_gamma * comp);
    }
    return f;
}

Eigen::MatrixXd trace_operator(const RegularizationOperator& reg) {
    return fourier_projection_matrix(*reg.grid) * Eigen::MatrixXd(reg.S_gamma);
}

}  // namespace fpsi
