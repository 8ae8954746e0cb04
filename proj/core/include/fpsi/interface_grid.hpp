#ifndef FPSI_INTERFACE_GRID_HPP
#define FPSI_INTERFACE_GRID_HPP

#include <Eigen/Dense>
#include <vector>

namespace fpsi {

/// Periodic sample grid z_j = 2*pi*j/M on the reference interface together
/// with the truncation order K of the trigonometric space. Coefficients of a
/// scalar field are stored as [a0, a1, b1, ..., aK, bK] for
/// f(z) = a0 + sum_m (a_m cos(m z) + b_m sin(m z)).
struct InterfaceGrid {
    int M = 0;
    int K = 0;
    std::vector<double> z;
    int ncoef() const { return 2 * K + 1; }
};

/// Requires M >= 4 and 1 <= K <= M/2; throws otherwise.
InterfaceGrid build_interface_grid(int M, int K);

Eigen::VectorXd fourier_project(const InterfaceGrid& g, const Eigen::VectorXd& samples);
Eigen::VectorXd fourier_evaluate(const InterfaceGrid& g, const Eigen::VectorXd& coeffs);
double fourier_eval_at(const InterfaceGrid& g, const Eigen::VectorXd& coeffs, double z);
Eigen::VectorXd fourier_derivative(const InterfaceGrid& g, const Eigen::VectorXd& coeffs);
Eigen::VectorXd fourier_second_derivative(const InterfaceGrid& g, const Eigen::VectorXd& coeffs);

/// Exact integral over [0, 2*pi) of the product of two fields in the
/// truncated space (Parseval).
double fourier_inner(const InterfaceGrid& g, const Eigen::VectorXd& c1, const Eigen::VectorXd& c2);

Eigen::MatrixXd fourier_projection_matrix(const InterfaceGrid& g);  // ncoef x M
Eigen::MatrixXd fourier_evaluation_matrix(const InterfaceGrid& g);  // M x ncoef
Eigen::VectorXd fourier_mass_diagonal(const InterfaceGrid& g);      // [2pi, pi, pi, ...]

/// Vector-valued field on the interface: one coefficient vector per component.
struct PlateField {
    Eigen::VectorXd c[2];
    static PlateField Zero(const InterfaceGrid& g);
};

double plate_l2norm2(const InterfaceGrid& g, const PlateField& f);
double plate_inner(const InterfaceGrid& g, const PlateField& f, const PlateField& h);
PlateField plate_axpy(double a, const PlateField& x, const PlateField& y);  // a*x + y
PlateField plate_laplacian(const InterfaceGrid& g, const PlateField& f);

}  // namespace fpsi

#endif
