#include "fpsi/geometry.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fpsi {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double node_angle(const Eigen::Vector2d& p) {
    double z = std::atan2(p.y(), p.x());
    return z < 0 ? z + kTwoPi : z;
}

double spectral_norm(const Eigen::Matrix2d& m) {
    return m.jacobiSvd().singularValues()[0];
}
}  // namespace

Eigen::Matrix2d def_gradient(const FESpace& p1, const Eigen::VectorXd& eta, int e) {
    const auto gl = p1.grad_lambda(e);
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 3; ++i) {
        int d = p1.elem_dofs[e][i];
        g.row(0) += eta[2 * d] * gl.row(i);
        g.row(1) += eta[2 * d + 1] * gl.row(i);
    }
    return g;
}

Eigen::Matrix2d lagrangian_grad(const FESpace& p1, const Eigen::VectorXd& eta, int e) {
    return Eigen::Matrix2d::Identity() + def_gradient(p1, eta, e);
}

double biot_jacobian(const FESpace& p1, const Eigen::VectorXd& eta, int e) {
    return lagrangian_grad(p1, eta, e).determinant();
}

Eigen::Vector2d transformed_grad(const Eigen::Matrix2d& F, const Eigen::Vector2d& grad) {
    return F.inverse().transpose() * grad;
}

Eigen::Matrix2d ALEMap::grad(int e) const { return def_gradient(*space, vals, e); }

double ALEMap::jac(int e) const { return grad(e).determinant(); }

ALEMap solve_ale_map(const FESpace& p1, const InterfaceGrid& g, const PlateField& omega) {
    const Mesh2D& mesh = *p1.mesh;
    auto interface_nodes = p1.boundary_dofs(BoundaryTag::Interface);
    auto outer_nodes = p1.boundary_dofs(BoundaryTag::Outer);

    std::vector<int> constrained = interface_nodes;
    constrained.insert(constrained.end(), outer_nodes.begin(), outer_nodes.end());
    std::vector<int> free_index;
    int nfree = build_free_index(p1.ndof, constrained, free_index);

    Eigen::SparseMatrix<double> k = assemble_stiffness(p1, tri_rule_deg2());

    ALEMap map;
    map.space = &p1;
    map.vals.resize(2 * p1.ndof);

    // Dirichlet data: map values per component.
    Eigen::VectorXd bc[2];
    bc[0] = Eigen::VectorXd::Zero(p1.ndof);
    bc[1] = Eigen::VectorXd::Zero(p1.ndof);
    for (int n : outer_nodes) {
        bc[0][n] = mesh.nodes[n].x();
        bc[1][n] = mesh.nodes[n].y();
    }
    for (int n : interface_nodes) {
        double z = node_angle(mesh.nodes[n]);
        bc[0][n] = mesh.nodes[n].x() + fourier_eval_at(g, omega.c[0], z);
        bc[1][n] = mesh.nodes[n].y() + fourier_eval_at(g, omega.c[1], z);
    }

    // Reduce to free dofs once; factor once, solve both components.
    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < k.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it) {
            int fi = free_index[it.row()], fj = free_index[it.col()];
            if (fi >= 0 && fj >= 0) trip.emplace_back(fi, fj, it.value());
        }
    Eigen::SparseMatrix<double> kff(nfree, nfree);
    kff.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(kff);
    if (solver.info() != Eigen::Success) throw std::runtime_error("ALE solve: factorization failed");

    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd rhs_full = -(k * bc[c]);
        Eigen::VectorXd rhs(nfree);
        for (int d = 0; d < p1.ndof; ++d)
            if (free_index[d] >= 0) rhs[free_index[d]] = rhs_full[d];
        Eigen::VectorXd xf = solver.solve(rhs);
        for (int d = 0; d < p1.ndof; ++d)
            map.vals[2 * d + c] = (free_index[d] >= 0) ? xf[free_index[d]] : bc[c][d];
    }
    return map;
}

Eigen::VectorXd ale_velocity(const ALEMap& now, const ALEMap& prev, double dt) {
    return (now.vals - prev.vals) / dt;
}

InterfaceFrame interface_frame(const InterfaceGrid& g, const PlateField& omega) {
    Eigen::VectorXd d1 = fourier_evaluate(g, fourier_derivative(g, omega.c[0]));
    Eigen::VectorXd d2 = fourier_evaluate(g, fourier_derivative(g, omega.c[1]));
    InterfaceFrame f;
    f.tx.resize(g.M);
    f.ty.resize(g.M);
    f.nx.resize(g.M);
    f.ny.resize(g.M);
    f.S.resize(g.M);
    for (int j = 0; j < g.M; ++j) {
        double z = g.z[j];
        f.tx[j] = -std::sin(z) + d1[j];
        f.ty[j] = std::cos(z) + d2[j];
        f.nx[j] = f.ty[j];
        f.ny[j] = -f.tx[j];
        f.S[j] = std::hypot(f.tx[j], f.ty[j]);
    }
    return f;
}

GeomCertificate certify_geometry(const FESpace& disk_p1, const Eigen::VectorXd& eta_delta,
                                 const ALEMap& ale, const InterfaceGrid& g,
                                 const PlateField& omega, const GeomThresholds& thr) {
    GeomCertificate cert;

    cert.min_det_biot = std::numeric_limits<double>::infinity();
    for (int e = 0; e < disk_p1.mesh->num_tris(); ++e)
        cert.min_det_biot = std::min(cert.min_det_biot, biot_jacobian(disk_p1, eta_delta, e));

    cert.min_jac_ale = std::numeric_limits<double>::infinity();
    cert.max_jac_ale = -std::numeric_limits<double>::infinity();
    cert.max_grad_ale = 0.0;
    for (int e = 0; e < ale.space->mesh->num_tris(); ++e) {
        Eigen::Matrix2d gr = ale.grad(e);
        double j = gr.determinant();
        cert.min_jac_ale = std::min(cert.min_jac_ale, j);
        cert.max_jac_ale = std::max(cert.max_jac_ale, j);
        cert.max_grad_ale = std::max(cert.max_grad_ale, spectral_norm(gr));
    }

    InterfaceFrame frame = interface_frame(g, omega);
    cert.alpha_tilde = frame.S.minCoeff();

    std::vector<Eigen::Vector2d> phi(g.M);
    cert.max_interface_radius = 0.0;
    for (int j = 0; j < g.M; ++j) {
        double z = g.z[j];
        phi[j] = {std::cos(z) + fourier_eval_at(g, omega.c[0], z),
                  std::sin(z) + fourier_eval_at(g, omega.c[1], z)};
        cert.max_interface_radius = std::max(cert.max_interface_radius, phi[j].norm());
    }
    cert.injectivity_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.M; ++i)
        for (int j = i + 1; j < g.M; ++j) {
            double dz = std::abs(g.z[i] - g.z[j]);
            double dist = std::min(dz, kTwoPi - dz);
            cert.injectivity_ratio =
                std::min(cert.injectivity_ratio, (phi[i] - phi[j]).norm() / dist);
        }

    cert.pass = true;
    auto check = [&](bool ok, const char* what) {
        if (!ok && cert.pass) {
            cert.pass = false;
            cert.failure = what;
        }
    };
    check(cert.min_det_biot >= thr.det_min, "biot jacobian below threshold");
    check(cert.min_jac_ale >= thr.ale_jac_min, "ale jacobian below threshold");
    check(cert.max_jac_ale <= thr.ale_jac_max, "ale jacobian above threshold");
    check(cert.max_grad_ale <= thr.ale_grad_max, "ale gradient above threshold");
    check(cert.alpha_tilde >= thr.alpha_min, "interface stretch below threshold");
    check(cert.injectivity_ratio >= 0.5 * cert.alpha_tilde, "interface self-distance too small");
    check(cert.max_interface_radius <= 2.0 - thr.clearance, "interface too close to outer wall");
    return cert;
}

double annulus_path_length(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    double r1 = a.norm(), r2 = b.norm();
    double dth = node_angle(b) - node_angle(a);
    // Wrap into (-pi, pi], ties toward +pi.
    dth = std::remainder(dth, kTwoPi);
    if (dth <= -kPi) dth = kPi;
    return std::abs(r1 - r2) + r2 * std::abs(dth);
}

std::vector<Eigen::Vector2d> annulus_path_polyline(const Eigen::Vector2d& a,
                                                   const Eigen::Vector2d& b, int arc_segments) {
    double r1 = a.norm(), r2 = b.norm();
    double th1 = node_angle(a);
    double dth = node_angle(b) - th1;
    dth = std::remainder(dth, kTwoPi);
    if (dth <= -kPi) dth = kPi;
    std::vector<Eigen::Vector2d> pts;
    Eigen::Vector2d dir{std::cos(th1), std::sin(th1)};
    for (int k = 0; k <= arc_segments; ++k) {
        double r = r1 + (r2 - r1) * k / arc_segments;
        pts.push_back(r * dir);
    }
    for (int k = 1; k <= arc_segments; ++k) {
        double th = th1 + dth * k / arc_segments;
        pts.push_back({r2 * std::cos(th), r2 * std::sin(th)});
    }
    return pts;
}

double polyline_length(const std::vector<Eigen::Vector2d>& pts) {
    double len = 0.0;
    for (size_t k = 1; k < pts.size(); ++k) len += (pts[k] - pts[k - 1]).norm();
    return len;
}

double mapped_polyline_length(const FESpace& p1, const Eigen::VectorXd& map_vals,
                              const std::vector<Eigen::Vector2d>& pts) {
    double len = 0.0;
    Eigen::Vector2d prev = p1.eval_vector(map_vals, pts[0]);
    for (size_t k = 1; k < pts.size(); ++k) {
        Eigen::Vector2d cur = p1.eval_vector(map_vals, pts[k]);
        len += (cur - prev).norm();
        prev = cur;
    }
    return len;
}

double max_map_gradient(const FESpace& p1, const Eigen::VectorXd& map_vals) {
    double m = 0.0;
    for (int e = 0; e < p1.mesh->num_tris(); ++e)
        m = std::max(m, spectral_norm(def_gradient(p1, map_vals, e)));
    return m;
}

}  // namespace fpsi
