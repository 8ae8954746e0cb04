#ifndef FPSI_PLATE_STEP_HPP
#define FPSI_PLATE_STEP_HPP

#include "fpsi/interface_grid.hpp"

namespace fpsi {

struct PlateStepResult {
    PlateField omega;  // half-step displacement (carried into the next substep)
    PlateField zeta;   // half-step velocity
};

/// Implicit plate substep, decoupled per trigonometric mode m and component
/// (the bilaplacian acts as multiplication by m^4):
///   (zeta - zeta_prev)/dt + m^4 zeta + m^4 (omega_prev + dt zeta) = 0,
///   omega = omega_prev + dt zeta.
/// The thickness factor h > 0 cancels from the substep.
PlateStepResult solve_plate_step(const InterfaceGrid& g, const PlateField& omega_prev,
                                 const PlateField& zeta_prev, double dt);

/// (1/2) h ||zeta||^2 + (1/2) h ||d_zz omega||^2.
double plate_energy(const InterfaceGrid& g, double h, const PlateField& omega,
                    const PlateField& zeta);

/// Residual of the exact per-step energy equality
///   E_half + (1/2)h||zeta_half - zeta_prev||^2
///          + (1/2)h||d_zz(omega_half - omega_prev)||^2
///          + dt*h*||d_zz zeta_half||^2 = E_prev,
/// together with the kinematic consistency omega_half - omega_prev =
/// dt*zeta_half. Returns the larger absolute residual.
double plate_identity_residual(const InterfaceGrid& g, double h, double dt,
                               const PlateField& omega_prev, const PlateField& zeta_prev,
                               const PlateStepResult& next);

}  // namespace fpsi

#endif
