#ifndef FPSI_DRIVER_HPP
#define FPSI_DRIVER_HPP

#include <string>
#include <vector>

#include "fpsi/biot_fluid_step.hpp"
#include "fpsi/config.hpp"
#include "fpsi/geometry.hpp"
#include "fpsi/plate_step.hpp"
#include "fpsi/regularizer.hpp"

namespace fpsi {

struct RunConfig {
    int refine = 1;    // mesh refinement level
    int M = 64;        // interface samples
    int K = 8;         // trigonometric truncation
    double delta = 0.3;
    double dt = 0.05;
    double T = 1.0;
    int nsteps = -1;   // overrides round(T/dt) when >= 0
    Params prm;
    GeomThresholds thresholds;

    int steps() const;
};

RunConfig run_config_from(const Config& cfg);

/// Owns the discretization; non-copyable because the spaces and the ALE maps
/// keep pointers into it.
struct Simulation {
    RunConfig cfg;
    Mesh2D disk_mesh, annulus_mesh;
    FESpace disk_p1, fluid, ann_p1;
    InterfaceGrid grid;
    RegularizationOperator reg;

    explicit Simulation(const RunConfig& c);
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;
};

struct InitialData {
    Eigen::VectorXd eta0, xi0;  // interleaved disk fields
    Eigen::VectorXd p0;
    Eigen::VectorXd u0;  // interleaved fluid field, projected during initialize
};

/// Smooth analytic datum controlled by config amplitudes (eta0_rot, eta0_dil,
/// eta0_m2, xi0_amp, p0_amp, u0_amp). The velocity is a radially weighted
/// swirl vanishing at the outer wall and exactly divergence-free.
InitialData make_initial_data(const Simulation& sim, const Config& cfg);

struct State {
    Eigen::VectorXd u, eta, xi, p;
    PlateField omega, zeta;
    ALEMap phi;
    double time = 0;
};

/// Builds the discrete initial state: regularized traces of eta0 and xi0,
/// ALE map at omega^0, and the weighted Stokes projection of u0 onto the
/// discretely divergence-free subspace. Throws std::invalid_argument if the
/// initial geometry certificate fails (rejected datum).
State initialize(const Simulation& sim, const InitialData& data);

struct StepRecord {
    int n = 0;
    double time = 0;     // t_{n+1}
    EnergyTerms energy;  // E^{n+1}
    double e_prev = 0, e_half = 0;
    double dissipation = 0;  // D^n including the plate share
    double plate_residual = 0, biot_residual = 0, solver_residual = 0;
    double drift = 0;  // ||omega^{n+1} - (R eta^{n+1})||
    GeomCertificate cert;
    PlateField omega, zeta, zeta_half;
};

enum class Outcome { Completed, PartialGeometry };

struct Trajectory {
    Outcome outcome = Outcome::Completed;
    std::string failure;  // certificate message when partial
    int steps_done = 0;
    double dt = 0;
    PlateField omega0, zeta0;
    double energy0 = 0;
    std::vector<StepRecord> records;
};

/// Advances the state over the configured horizon; stops early with a typed
/// partial outcome when the geometric certificate fails.
Trajectory run(const Simulation& sim, State& st);

/// Piecewise-constant, piecewise-linear and staggered-velocity time
/// reconstructions of the interface motion.
PlateField omega_pc(const Trajectory& tr, double t);
PlateField omega_linear(const Trajectory& tr, double t);
PlateField zeta_star(const Trajectory& tr, double t);

}  // namespace fpsi

#endif
