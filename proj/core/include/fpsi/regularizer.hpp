#ifndef FPSI_REGULARIZER_HPP
#define FPSI_REGULARIZER_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fpsi/fe_space.hpp"
#include "fpsi/interface_grid.hpp"

namespace fpsi {

/// Compactly supported radial mollifier phi_delta(x) = delta^-2 phi(x/delta),
/// phi(z) = C exp(-1/(1-|z|^2)) for |z| < 1, with C fixed so phi has unit mass.
struct Mollifier {
    double delta = 0.5;
    double C = 0.0;

    explicit Mollifier(double delta_);
    double value(const Eigen::Vector2d& r) const;
};

/// Linear regularization operator: radial-clamp extension of a P1 field on
/// the unit disk (f(x) := f(x/|x|) for |x| > 1) followed by convolution with
/// the mollifier, sampled on three evaluation sets. Rows are renormalized to
/// unit mass so constants are reproduced exactly. The same scalar operator is
/// applied to each component of a vector field.
struct RegularizationOperator {
    const FESpace* disk_p1 = nullptr;
    const InterfaceGrid* grid = nullptr;
    double delta = 0.5;
    int kernel_nr = 16;
    int kernel_nt = 16;

    Eigen::SparseMatrix<double, Eigen::RowMajor> S_nodes;  // ndof x ndof
    Eigen::SparseMatrix<double, Eigen::RowMajor> S_quad;   // 3*ntri x ndof
    Eigen::SparseMatrix<double, Eigen::RowMajor> S_gamma;  // M x ndof
    std::vector<Eigen::Vector2d> quad_pts;
};

/// Normalized kernel-quadrature row of the operator at point x (dense).
/// nr x nt midpoint cells on the polar kernel grid.
Eigen::VectorXd regularizer_row(const FESpace& disk_p1, double delta, const Eigen::Vector2d& x,
                                int nr, int nt);

RegularizationOperator build_regularizer(const FESpace& disk_p1, const InterfaceGrid& grid,
                                         double delta, int kernel_nr = 16, int kernel_nt = 16);

/// Componentwise application to an interleaved nodal vector field; the result
/// is again an interleaved nodal field (the P1 representative of eta^delta).
Eigen::VectorXd regularize_nodal(const RegularizationOperator& reg, const Eigen::VectorXd& eta);

/// Regularized interface trace: sample on Gamma, then project each component
/// onto the truncated trigonometric space.
PlateField regularized_trace(const RegularizationOperator& reg, const Eigen::VectorXd& eta);

/// Coefficient-level trace matrix R: nodal scalar dofs -> Fourier coefficients
/// (applied per component). R = projection * S_gamma.
Eigen::MatrixXd trace_operator(const RegularizationOperator& reg);

}  // namespace fpsi

#endif
