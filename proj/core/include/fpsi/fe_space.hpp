#ifndef FPSI_FE_SPACE_HPP
#define FPSI_FE_SPACE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <vector>

#include "fpsi/mesh.hpp"
#include "fpsi/quadrature.hpp"

namespace fpsi {

/// Scalar Lagrange space on a triangle mesh; vector-valued fields interleave
/// components as (2*dof, 2*dof+1).
struct FESpace {
    enum class Kind { P1, P2 };

    Kind kind = Kind::P1;
    const Mesh2D* mesh = nullptr;
    int ndof = 0;
    std::vector<Eigen::Vector2d> dof_xy;
    std::vector<std::array<int, 6>> elem_dofs;  // P1 uses entries 0..2

    struct BEdgeDofs {
        int a, b, mid;  // mid = -1 for P1
        BoundaryTag tag;
    };
    std::vector<BEdgeDofs> bedge_dofs;

    int local_size() const { return kind == Kind::P1 ? 3 : 6; }
    std::vector<int> boundary_dofs(BoundaryTag tag) const;

    /// Shape values at a barycentric point (length local_size).
    Eigen::VectorXd shape(const Eigen::Vector3d& bary) const;
    /// Physical shape gradients (local_size x 2); grad_l = grad_lambda(e).
    Eigen::MatrixXd shape_grad(const Eigen::Vector3d& bary,
                               const Eigen::Matrix<double, 3, 2>& grad_l) const;
    /// Constant barycentric gradients of element e (3 x 2).
    Eigen::Matrix<double, 3, 2> grad_lambda(int e) const;

    /// Point evaluation of a scalar coefficient vector; barycentric
    /// coordinates are clamped to the element so that points marginally
    /// outside the mesh polygon still evaluate. Throws if locate fails.
    double eval(const Eigen::VectorXd& coeffs, const Eigen::Vector2d& x) const;
    Eigen::Vector2d eval_vector(const Eigen::VectorXd& coeffs, const Eigen::Vector2d& x) const;
};

FESpace make_p1_space(const Mesh2D& mesh);
FESpace make_p2_space(const Mesh2D& mesh);

Eigen::SparseMatrix<double> assemble_mass(const FESpace& fes, const QuadRule& rule);
Eigen::SparseMatrix<double> assemble_stiffness(const FESpace& fes, const QuadRule& rule);

/// Map full dofs to free dofs: free_index[d] = position among unconstrained
/// dofs or -1. Returns the number of free dofs.
int build_free_index(int ndof, const std::vector<int>& constrained, std::vector<int>& free_index);

}  // namespace fpsi

#endif
