#include "fpsi/fe_space.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace fpsi {

const QuadRule& tri_rule_deg2() {
    static const QuadRule rule = [] {
        QuadRule r;
        r.bary = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
        r.w = {1.0 / 3, 1.0 / 3, 1.0 / 3};
        return r;
    }();
    return rule;
}

const QuadRule& tri_rule_deg5() {
    static const QuadRule rule = [] {
        QuadRule r;
        const double s = std::sqrt(15.0);
        const double a1 = (6.0 - s) / 21.0, b1 = (9.0 + 2.0 * s) / 21.0;
        const double a2 = (6.0 + s) / 21.0, b2 = (9.0 - 2.0 * s) / 21.0;
        const double w0 = 9.0 / 40.0;
        const double w1 = (155.0 - s) / 1200.0;
        const double w2 = (155.0 + s) / 1200.0;
        r.bary = {{1.0 / 3, 1.0 / 3, 1.0 / 3},
                  {a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
                  {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}};
        r.w = {w0, w1, w1, w1, w2, w2, w2};
        return r;
    }();
    return rule;
}

QuadRule tri_rule_refined(int nsub, const QuadRule& base) {
    // Subdivide the reference triangle into nsub^2 congruent cells (upright
    // and inverted) and map the base rule onto each.
    QuadRule out;
    const double h = 1.0 / nsub;
    auto emit = [&](const Eigen::Vector3d v0, const Eigen::Vector3d v1, const Eigen::Vector3d v2) {
        for (int q = 0; q < base.size(); ++q) {
            const Eigen::Vector3d& b = base.bary[q];
            out.bary.push_back(b[0] * v0 + b[1] * v1 + b[2] * v2);
            out.w.push_back(base.w[q] / (nsub * nsub));
        }
    };
    auto corner = [&](int i, int j) {  // barycentric of lattice point
        return Eigen::Vector3d{1.0 - (i + j) * h, i * h, j * h};
    };
    for (int i = 0; i < nsub; ++i)
        for (int j = 0; j < nsub - i; ++j) {
            emit(corner(i, j), corner(i + 1, j), corner(i, j + 1));
            if (i + j < nsub - 1)
                emit(corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1));
        }
    return out;
}

const EdgeRule& edge_rule_deg5() {
    static const EdgeRule rule = [] {
        EdgeRule r;
        const double s = std::sqrt(3.0 / 5.0);
        r.t = {0.5 * (1.0 - s), 0.5, 0.5 * (1.0 + s)};
        r.w = {5.0 / 18, 8.0 / 18, 5.0 / 18};
        return r;
    }();
    return rule;
}

std::vector<int> FESpace::boundary_dofs(BoundaryTag tag) const {
    std::vector<char> mark(ndof, 0);
    for (const auto& be : bedge_dofs) {
        if (be.tag != tag) continue;
        mark[be.a] = mark[be.b] = 1;
        if (be.mid >= 0) mark[be.mid] = 1;
    }
    std::vector<int> out;
    for (int d = 0; d < ndof; ++d)
        if (mark[d]) out.push_back(d);
    return out;
}

Eigen::VectorXd FESpace::shape(const Eigen::Vector3d& b) const {
    if (kind == Kind::P1) return b;
    Eigen::VectorXd n(6);
    for (int i = 0; i < 3; ++i) n[i] = b[i] * (2.0 * b[i] - 1.0);
    n[3] = 4.0 * b[1] * b[2];  // midside opposite vertex 0
    n[4] = 4.0 * b[2] * b[0];
    n[5] = 4.0 * b[0] * b[1];
    return n;
}

Eigen::MatrixXd FESpace::shape_grad(const Eigen::Vector3d& b,
                                    const Eigen::Matrix<double, 3, 2>& gl) const {
    if (kind == Kind::P1) return gl;
    Eigen::MatrixXd g(6, 2);
    for (int i = 0; i < 3; ++i) g.row(i) = (4.0 * b[i] - 1.0) * gl.row(i);
    g.row(3) = 4.0 * (b[2] * gl.row(1) + b[1] * gl.row(2));
    g.row(4) = 4.0 * (b[0] * gl.row(2) + b[2] * gl.row(0));
    g.row(5) = 4.0 * (b[1] * gl.row(0) + b[0] * gl.row(1));
    return g;
}

Eigen::Matrix<double, 3, 2> FESpace::grad_lambda(int e) const {
    const auto& t = mesh->tris[e];
    const double a2 = 2.0 * mesh->tri_area(e);
    Eigen::Matrix<double, 3, 2> gl;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector2d d = mesh->nodes[t[(i + 1) % 3]] - mesh->nodes[t[(i + 2) % 3]];
        gl(i, 0) = d.y() / a2;
        gl(i, 1) = -d.x() / a2;
    }
    return gl;
}

namespace {

Eigen::Vector3d clamped_bary(const Mesh2D& mesh, int e, const Eigen::Vector2d& x) {
    Eigen::Vector3d b = mesh.barycentric(e, x);
    for (int i = 0; i < 3; ++i) b[i] = std::max(b[i], 0.0);
    double s = b.sum();
    return b / s;
}

}  // namespace

double FESpace::eval(const Eigen::VectorXd& coeffs, const Eigen::Vector2d& x) const {
    int e = mesh->locate(x);
    if (e < 0) throw std::runtime_error("FESpace::eval: point outside mesh");
    Eigen::VectorXd n = shape(clamped_bary(*mesh, e, x));
    double v = 0.0;
    for (int i = 0; i < local_size(); ++i) v += coeffs[elem_dofs[e][i]] * n[i];
    return v;
}

Eigen::Vector2d FESpace::eval_vector(const Eigen::VectorXd& coeffs, const Eigen::Vector2d& x) const {
    int e = mesh->locate(x);
    if (e < 0) throw std::runtime_error("FESpace::eval_vector: point outside mesh");
    Eigen::VectorXd n = shape(clamped_bary(*mesh, e, x));
    Eigen::Vector2d v{0.0, 0.0};
    for (int i = 0; i < local_size(); ++i) {
        int d = elem_dofs[e][i];
        v.x() += coeffs[2 * d] * n[i];
        v.y() += coeffs[2 * d + 1] * n[i];
    }
    return v;
}

FESpace make_p1_space(const Mesh2D& mesh) {
    FESpace s;
    s.kind = FESpace::Kind::P1;
    s.mesh = &mesh;
    s.ndof = mesh.num_nodes();
    s.dof_xy = mesh.nodes;
    s.elem_dofs.resize(mesh.num_tris());
    for (int e = 0; e < mesh.num_tris(); ++e) {
        const auto& t = mesh.tris[e];
        s.elem_dofs[e] = {t[0], t[1], t[2], -1, -1, -1};
    }
    for (const auto& be : mesh.bedges) s.bedge_dofs.push_back({be.a, be.b, -1, be.tag});
    return s;
}

FESpace make_p2_space(const Mesh2D& mesh) {
    FESpace s;
    s.kind = FESpace::Kind::P2;
    s.mesh = &mesh;
    s.dof_xy = mesh.nodes;
    s.elem_dofs.resize(mesh.num_tris());

    std::map<std::pair<int, int>, int> edge_dof;
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    auto get_mid = [&](int a, int b) {
        auto k = key(a, b);
        auto it = edge_dof.find(k);
        if (it != edge_dof.end()) return it->second;
        int d = static_cast<int>(s.dof_xy.size());
        s.dof_xy.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
        edge_dof.emplace(k, d);
        return d;
    };
    for (int e = 0; e < mesh.num_tris(); ++e) {
        const auto& t = mesh.tris[e];
        s.elem_dofs[e] = {t[0], t[1], t[2],
                          get_mid(t[1], t[2]), get_mid(t[2], t[0]), get_mid(t[0], t[1])};
    }
    s.ndof = static_cast<int>(s.dof_xy.size());
    for (const auto& be : mesh.bedges)
        s.bedge_dofs.push_back({be.a, be.b, edge_dof.at(key(be.a, be.b)), be.tag});
    return s;
}

namespace {

template <typename Local>
Eigen::SparseMatrix<double> assemble_scalar(const FESpace& fes, const QuadRule& rule, Local local) {
    const int nl = fes.local_size();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(fes.mesh->num_tris() * nl * nl);
    for (int e = 0; e < fes.mesh->num_tris(); ++e) {
        Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(nl, nl);
        const double area = fes.mesh->tri_area(e);
        const auto gl = fes.grad_lambda(e);
        for (int q = 0; q < rule.size(); ++q)
            local(e, rule.bary[q], gl, rule.w[q] * area, ke);
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < nl; ++j)
                trip.emplace_back(fes.elem_dofs[e][i], fes.elem_dofs[e][j], ke(i, j));
    }
    Eigen::SparseMatrix<double> m(fes.ndof, fes.ndof);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_mass(const FESpace& fes, const QuadRule& rule) {
    return assemble_scalar(fes, rule,
                           [&](int, const Eigen::Vector3d& b, const Eigen::Matrix<double, 3, 2>&,
                               double w, Eigen::MatrixXd& ke) {
                               Eigen::VectorXd n = fes.shape(b);
                               ke.noalias() += w * n * n.transpose();
                           });
}

Eigen::SparseMatrix<double> assemble_stiffness(const FESpace& fes, const QuadRule& rule) {
    return assemble_scalar(fes, rule,
                           [&](int, const Eigen::Vector3d& b, const Eigen::Matrix<double, 3, 2>& gl,
                               double w, Eigen::MatrixXd& ke) {
                               Eigen::MatrixXd g = fes.shape_grad(b, gl);
                               ke.noalias() += w * g * g.transpose();
                           });
}

int build_free_index(int ndof, const std::vector<int>& constrained, std::vector<int>& free_index) {
    free_index.assign(ndof, 0);
    for (int d : constrained) free_index[d] = -1;
    int nfree = 0;
    for (int d = 0; d < ndof; ++d)
        if (free_index[d] == 0) free_index[d] = nfree++;
    return nfree;
}

}  // namespace fpsi
