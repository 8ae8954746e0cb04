#ifndef FPSI_BIOT_FLUID_STEP_HPP
#define FPSI_BIOT_FLUID_STEP_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fpsi/fe_space.hpp"
#include "fpsi/geometry.hpp"
#include "fpsi/interface_grid.hpp"
#include "fpsi/regularizer.hpp"

namespace fpsi {

struct Params {
    double nu = 0.01;      // fluid viscosity
    double beta = 1.0;     // slip friction
    double rho_b = 1.0;    // Biot solid density
    double h = 1.0;        // plate thickness
    double mu_e = 1.0;     // elastic Lame parameters
    double lambda_e = 1.0;
    double mu_v = 1.0;     // viscoelastic Lame parameters
    double lambda_v = 1.0;
    double c0 = 1.0;       // storage coefficient
    double alpha = 1.0;    // Biot-Willis coupling
    double kappa = 1.0;    // permeability
};

/// Everything that is fixed while assembling and solving one implicit
/// Biot-fluid substep. All geometric weights are taken at time level n,
/// except the next ALE Jacobian entering the Temam stabilization.
struct BiotFluidInputs {
    const FESpace* fluid = nullptr;    // P2 vector velocity on the annulus
    const FESpace* ann_p1 = nullptr;   // P1 on the annulus (multiplier, ALE)
    const FESpace* disk_p1 = nullptr;  // P1 on the disk (displacement, pressure)
    const InterfaceGrid* grid = nullptr;
    const RegularizationOperator* reg = nullptr;
    Params prm;
    double dt = 0.0;

    const Eigen::VectorXd* u_n = nullptr;    // interleaved, 2 * fluid->ndof
    const Eigen::VectorXd* eta_n = nullptr;  // interleaved, 2 * disk_p1->ndof
    const Eigen::VectorXd* xi_n = nullptr;   // discrete velocity at level n
    const Eigen::VectorXd* p_n = nullptr;
    const PlateField* zeta_half = nullptr;
    const PlateField* omega_n = nullptr;  // interface frame geometry
    const ALEMap* phi_n = nullptr;
    const ALEMap* phi_np1 = nullptr;
};

/// The assembled saddle system in the time-rescaled variables (velocity,
/// multiplier and pressure rows carry dt^3, displacement rows dt^2), with the
/// divergence constraint added as a skew pair so the multiplier drops out of
/// the quadratic form. Unknown layout: [u_free, pi, eta, p].
struct StepSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    int off_u = 0, off_pi = 0, off_eta = 0, off_p = 0, ntot = 0;
    std::vector<int> u_free;  // free index per scalar fluid dof, -1 on the outer wall
    int n_ufree = 0;

    Eigen::MatrixXd R;   // regularized-trace coefficients: ncoef x ndisk, per component
    Eigen::MatrixXd Rt;  // trace samples: M x ndisk (evaluation of R at the grid)

    int gu(int dof, int c) const { return u_free[dof] < 0 ? -1 : 2 * u_free[dof] + c; }
    int gpi(int dof) const { return off_pi + dof; }
    int geta(int dof, int c) const { return off_eta + 2 * dof + c; }
    int gp(int dof) const { return off_p + dof; }
};

StepSystem assemble_step(const BiotFluidInputs& in);

struct StepResult {
    Eigen::VectorXd u, eta, p;  // full coefficient vectors at level n+1
    Eigen::VectorXd pi;
    Eigen::VectorXd xi;   // (eta^{n+1} - eta^n)/dt
    PlateField zeta;      // regularized trace of xi
    double residual = 0;  // relative residual of the solved linear system
};

StepResult solve_step(const BiotFluidInputs& in, const StepSystem& sys);

/// Pack full fields into the system unknown layout (constrained velocity dofs
/// are dropped; they must be zero for the packing to be consistent).
Eigen::VectorXd pack_state(const StepSystem& sys, const Eigen::VectorXd& u_full,
                           const Eigen::VectorXd& pi, const Eigen::VectorXd& eta,
                           const Eigen::VectorXd& p);

/// Closed-form value that x^T A x must equal: the sum of the weighted mass,
/// viscous, slip, elastic, storage and Darcy quadratic terms.
double coercivity_reference(const BiotFluidInputs& in, const StepSystem& sys,
                            const Eigen::VectorXd& x);

struct DarcyBound {
    double darcy_term = 0;   // kappa dt^3 int J^theta |grad^theta p|^2
    double lower_bound = 0;  // kappa dt^3 c1 c2^-2 int |grad p|^2
};
DarcyBound darcy_bound(const BiotFluidInputs& in, const Eigen::VectorXd& p);

/// int J^phi |u|^2 over the annulus.
double fluid_weighted_l2(const FESpace& fluid, const ALEMap& phi, const Eigen::VectorXd& u);
/// int |v|^2 of an interleaved P1 field over its mesh.
double vector_l2norm2(const FESpace& p1, const Eigen::VectorXd& v);
double scalar_l2norm2(const FESpace& p1, const Eigen::VectorXd& v);

struct ElasticNorms {
    double d_norm2 = 0;    // int |D(eta)|^2
    double div_norm2 = 0;  // int |div eta|^2
};
ElasticNorms elastic_norms(const FESpace& disk_p1, const Eigen::VectorXd& eta);

struct EnergyTerms {
    double fluid = 0, biot_kinetic = 0, plate_kinetic = 0, plate_bending = 0;
    double elastic_d = 0, elastic_div = 0, pressure = 0;
    double total() const {
        return fluid + biot_kinetic + plate_kinetic + plate_bending + elastic_d + elastic_div +
               pressure;
    }
};

EnergyTerms total_energy(const FESpace& fluid_sp, const ALEMap& phi, const Eigen::VectorXd& u,
                         const FESpace& disk_p1, const Eigen::VectorXd& xi,
                         const Eigen::VectorXd& eta, const Eigen::VectorXd& p,
                         const InterfaceGrid& grid, const PlateField& omega,
                         const PlateField& zeta, const Params& prm);

/// dt * (viscous + slip + Biot-viscous + Darcy) dissipation of one substep
/// (the plate-viscous share belongs to the plate substep identity).
double biot_dissipation(const BiotFluidInputs& in, const StepSystem& sys, const StepResult& out);

/// Residual of the exact substep energy equality
///   E^{n+1} + D + (1/2) int J^n |u jump|^2 + (1/2) rho_b ||xi jump||^2
///           + (1/2) h ||zeta^{n+1} - zeta^{n+1/2}||^2 + mu_e ||D(eta jump)||^2
///           + (1/2) lambda_e ||div(eta jump)||^2 + (1/2) c0 ||p jump||^2
///   = E^{n+1/2}.
double biot_identity_residual(const BiotFluidInputs& in, const StepSystem& sys,
                              const StepResult& out, const PlateField& omega_np1);

}  // namespace fpsi

#endif
