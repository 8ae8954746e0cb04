#include <doctest.h>

#include <random>

#include "fpsi/driver.hpp"

using namespace fpsi;

namespace {

struct Setup {
    Simulation sim;
    State st;
    PlateStepResult plate;
    ALEMap phi_np1;

    Setup() : sim(make_cfg()) {
        Config c;
        st = initialize(sim, make_initial_data(sim, c));
        plate = solve_plate_step(sim.grid, st.omega, st.zeta, sim.cfg.dt);
        phi_np1 = solve_ale_map(sim.ann_p1, sim.grid, plate.omega);
    }

    static RunConfig make_cfg() {
        RunConfig rc;
        rc.refine = 0;
        rc.M = 32;
        rc.K = 4;
        rc.delta = 0.3;
        rc.dt = 0.05;
        rc.nsteps = 1;
        return rc;
    }

    BiotFluidInputs inputs() const {
        BiotFluidInputs in;
        in.fluid = &sim.fluid;
        in.ann_p1 = &sim.ann_p1;
        in.disk_p1 = &sim.disk_p1;
        in.grid = &sim.grid;
        in.reg = &sim.reg;
        in.prm = sim.cfg.prm;
        in.dt = sim.cfg.dt;
        in.u_n = &st.u;
        in.eta_n = &st.eta;
        in.xi_n = &st.xi;
        in.p_n = &st.p;
        in.zeta_half = &plate.zeta;
        in.omega_n = &st.omega;
        in.phi_n = &st.phi;
        in.phi_np1 = &phi_np1;
        return in;
    }
};

}  // namespace

TEST_CASE("assembled system has the expected layout") {
    Setup s;
    BiotFluidInputs in = s.inputs();
    StepSystem sys = assemble_step(in);
    CHECK(sys.ntot == sys.A.rows());
    CHECK(sys.ntot == sys.A.cols());
    CHECK(sys.off_pi == 2 * sys.n_ufree);
    CHECK(sys.off_p - sys.off_eta == 2 * s.sim.disk_p1.ndof);
    CHECK(sys.R.rows() == s.sim.grid.ncoef());
    CHECK(sys.Rt.rows() == s.sim.grid.M);
}

TEST_CASE("quadratic form matches the closed-form coercivity expression") {
    Setup s;
    BiotFluidInputs in = s.inputs();
    StepSystem sys = assemble_step(in);
    std::mt19937 rng(67);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 10; ++k) {
        Eigen::VectorXd x(sys.ntot);
        for (int i = 0; i < sys.ntot; ++i) x[i] = nd(rng);
        double quad = x.dot(sys.A * x);
        double ref = coercivity_reference(in, sys, x);
        CHECK(std::abs(quad - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
        CHECK(ref > 0.0);
    }
}

TEST_CASE("solve meets the residual contract and the energy identity") {
    Setup s;
    BiotFluidInputs in = s.inputs();
    StepSystem sys = assemble_step(in);
    StepResult out = solve_step(in, sys);
    CHECK(out.residual <= 1e-10);
    double e_half = total_energy(s.sim.fluid, s.st.phi, s.st.u, s.sim.disk_p1, s.st.xi, s.st.eta,
                                 s.st.p, s.sim.grid, s.plate.omega, s.plate.zeta, in.prm)
                        .total();
    CHECK(biot_identity_residual(in, sys, out, s.plate.omega) <= 1e-9 * std::max(1.0, e_half));
    double e_np1 = total_energy(s.sim.fluid, s.phi_np1, out.u, s.sim.disk_p1, out.xi, out.eta,
                                out.p, s.sim.grid, s.plate.omega, out.zeta, in.prm)
                       .total();
    CHECK(e_np1 <= e_half + 1e-12 * std::max(1.0, e_half));
}

TEST_CASE("outer wall velocity stays constrained") {
    Setup s;
    BiotFluidInputs in = s.inputs();
    StepSystem sys = assemble_step(in);
    StepResult out = solve_step(in, sys);
    for (int d : s.sim.fluid.boundary_dofs(BoundaryTag::Outer)) {
        CHECK(out.u[2 * d] == 0.0);
        CHECK(out.u[2 * d + 1] == 0.0);
    }
}

TEST_CASE("darcy term dominates its isotropic lower bound") {
    Setup s;
    BiotFluidInputs in = s.inputs();
    std::mt19937 rng(71);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 10; ++k) {
        Eigen::VectorXd p(s.sim.disk_p1.ndof);
        for (int i = 0; i < p.size(); ++i) p[i] = nd(rng);
        DarcyBound db = darcy_bound(in, p);
        CHECK(db.darcy_term >= db.lower_bound * (1.0 - 1e-12));
        CHECK(db.darcy_term >= 0.0);
    }
}

TEST_CASE("pack_state inverts the solution unpacking") {
    Setup s;
    BiotFluidInputs in = s.inputs();
    StepSystem sys = assemble_step(in);
    StepResult out = solve_step(in, sys);
    Eigen::VectorXd x = pack_state(sys, out.u, out.pi, out.eta, out.p);
    CHECK(x.size() == sys.ntot);
    // repacked state solves the same system
    double rel = (sys.A * x - sys.b).norm() / sys.b.norm();
    CHECK(rel <= 1e-9);
}

TEST_CASE("energy terms are individually nonnegative") {
    Setup s;
    EnergyTerms e = total_energy(s.sim.fluid, s.st.phi, s.st.u, s.sim.disk_p1, s.st.xi, s.st.eta,
                                 s.st.p, s.sim.grid, s.st.omega, s.st.zeta, s.sim.cfg.prm);
    CHECK(e.fluid >= 0.0);
    CHECK(e.biot_kinetic >= 0.0);
    CHECK(e.plate_kinetic >= 0.0);
    CHECK(e.plate_bending >= 0.0);
    CHECK(e.elastic_d >= 0.0);
    CHECK(e.elastic_div >= 0.0);
    CHECK(e.pressure >= 0.0);
    CHECK(e.total() > 0.0);
}
