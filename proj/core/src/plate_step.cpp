#include "fpsi/plate_step.hpp"

#include <cmath>

namespace fpsi {

namespace {

// Mode order of coefficient index i in the layout [a0, a1, b1, ..., aK, bK].
int mode_of(int i) { return (i + 1) / 2; }

}  // namespace

PlateStepResult solve_plate_step(const InterfaceGrid& g, const PlateField& omega_prev,
                                 const PlateField& zeta_prev, double dt) {
    PlateStepResult out;
    for (int c = 0; c < 2; ++c) {
        out.zeta.c[c].resize(g.ncoef());
        out.omega.c[c].resize(g.ncoef());
        for (int i = 0; i < g.ncoef(); ++i) {
            double m = mode_of(i);
            double m4 = m * m * m * m;
            double zeta = (zeta_prev.c[c][i] / dt - m4 * omega_prev.c[c][i]) /
                          (1.0 / dt + m4 + dt * m4);
            out.zeta.c[c][i] = zeta;
            out.omega.c[c][i] = omega_prev.c[c][i] + dt * zeta;
        }
    }
    return out;
}

double plate_energy(const InterfaceGrid& g, double h, const PlateField& omega,
                    const PlateField& zeta) {
    return 0.5 * h * plate_l2norm2(g, zeta) + 0.5 * h * plate_l2norm2(g, plate_laplacian(g, omega));
}

double plate_identity_residual(const InterfaceGrid& g, double h, double dt,
                               const PlateField& omega_prev, const PlateField& zeta_prev,
                               const PlateStepResult& next) {
    PlateField zeta_jump = plate_axpy(-1.0, zeta_prev, next.zeta);
    PlateField omega_jump = plate_axpy(-1.0, omega_prev, next.omega);

    double lhs = plate_energy(g, h, next.omega, next.zeta) +
                 0.5 * h * plate_l2norm2(g, zeta_jump) +
                 0.5 * h * plate_l2norm2(g, plate_laplacian(g, omega_jump)) +
                 dt * h * plate_l2norm2(g, plate_laplacian(g, next.zeta));
    double rhs = plate_energy(g, h, omega_prev, zeta_prev);
    double res = std::abs(lhs - rhs);

    PlateField kin = plate_axpy(-dt, next.zeta, omega_jump);
    res = std::max(res, std::sqrt(plate_l2norm2(g, kin)));
    return res;
}

}  // namespace fpsi
