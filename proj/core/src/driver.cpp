#include "fpsi/driver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace fpsi {

namespace {

Eigen::VectorXd component(const Eigen::VectorXd& interleaved, int c) {
    int n = static_cast<int>(interleaved.size()) / 2;
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = interleaved[2 * i + c];
    return out;
}

PlateField trace_field(const RegularizationOperator& reg, const Eigen::VectorXd& v) {
    return regularized_trace(reg, v);
}

}  // namespace

int RunConfig::steps() const {
    if (nsteps >= 0) return nsteps;
    return static_cast<int>(std::llround(T / dt));
}

RunConfig run_config_from(const Config& cfg) {
    RunConfig rc;
    rc.refine = cfg.get_int("refine", rc.refine);
    rc.M = cfg.get_int("M", rc.M);
    rc.K = cfg.get_int("K", rc.K);
    rc.delta = cfg.get_double("delta", rc.delta);
    rc.dt = cfg.get_double("dt", rc.dt);
    rc.T = cfg.get_double("T", rc.T);
    rc.nsteps = cfg.get_int("nsteps", rc.nsteps);

    rc.prm.nu = cfg.get_double("nu", rc.prm.nu);
    rc.prm.beta = cfg.get_double("beta", rc.prm.beta);
    rc.prm.rho_b = cfg.get_double("rho_b", rc.prm.rho_b);
    rc.prm.h = cfg.get_double("h", rc.prm.h);
    rc.prm.mu_e = cfg.get_double("mu_e", rc.prm.mu_e);
    rc.prm.lambda_e = cfg.get_double("lambda_e", rc.prm.lambda_e);
    rc.prm.mu_v = cfg.get_double("mu_v", rc.prm.mu_v);
    rc.prm.lambda_v = cfg.get_double("lambda_v", rc.prm.lambda_v);
    rc.prm.c0 = cfg.get_double("c0", rc.prm.c0);
    rc.prm.alpha = cfg.get_double("alpha", rc.prm.alpha);
    rc.prm.kappa = cfg.get_double("kappa", rc.prm.kappa);

    rc.thresholds.det_min = cfg.get_double("cert_det_min", rc.thresholds.det_min);
    rc.thresholds.ale_jac_min = cfg.get_double("cert_ale_jac_min", rc.thresholds.ale_jac_min);
    rc.thresholds.ale_jac_max = cfg.get_double("cert_ale_jac_max", rc.thresholds.ale_jac_max);
    rc.thresholds.ale_grad_max = cfg.get_double("cert_ale_grad_max", rc.thresholds.ale_grad_max);
    rc.thresholds.alpha_min = cfg.get_double("cert_alpha_min", rc.thresholds.alpha_min);
    rc.thresholds.clearance = cfg.get_double("cert_clearance", rc.thresholds.clearance);
    return rc;
}

Simulation::Simulation(const RunConfig& c)
    : cfg(c),
      disk_mesh(build_disk_mesh(c.refine)),
      annulus_mesh(build_annulus_mesh(c.refine)),
      disk_p1(make_p1_space(disk_mesh)),
      fluid(make_p2_space(annulus_mesh)),
      ann_p1(make_p1_space(annulus_mesh)),
      grid(build_interface_grid(c.M, c.K)),
      reg(build_regularizer(disk_p1, grid, c.delta)) {}

InitialData make_initial_data(const Simulation& sim, const Config& cfg) {
    const double a_rot = cfg.get_double("eta0_rot", 0.02);
    const double a_dil = cfg.get_double("eta0_dil", 0.01);
    const double a_m2 = cfg.get_double("eta0_m2", 0.005);
    const double a_xi = cfg.get_double("xi0_amp", 0.01);
    const double a_p = cfg.get_double("p0_amp", 0.1);
    const double a_u = cfg.get_double("u0_amp", 0.1);

    InitialData d;
    const int nd = sim.disk_p1.ndof;
    d.eta0.resize(2 * nd);
    d.xi0.resize(2 * nd);
    d.p0.resize(nd);
    for (int i = 0; i < nd; ++i) {
        const Eigen::Vector2d& x = sim.disk_p1.dof_xy[i];
        d.eta0[2 * i] = a_rot * (-x.y()) + a_dil * x.x() + a_m2 * (x.x() * x.x() - x.y() * x.y());
        d.eta0[2 * i + 1] = a_rot * x.x() + a_dil * x.y() + a_m2 * (2.0 * x.x() * x.y());
        d.xi0[2 * i] = a_xi * x.x();
        d.xi0[2 * i + 1] = -a_xi * x.y();
        d.p0[i] = a_p * (1.0 - x.squaredNorm());
    }
    const int nf = sim.fluid.ndof;
    d.u0.resize(2 * nf);
    for (int i = 0; i < nf; ++i) {
        const Eigen::Vector2d& x = sim.fluid.dof_xy[i];
        double r = x.norm();
        double f = a_u * (2.0 - r) * (2.0 - r);
        d.u0[2 * i] = f * (-x.y());
        d.u0[2 * i + 1] = f * x.x();
    }
    return d;
}

State initialize(const Simulation& sim, const InitialData& data) {
    const FESpace& fl = sim.fluid;
    const FESpace& ap1 = sim.ann_p1;
    const InterfaceGrid& g = sim.grid;

    State st;
    st.eta = data.eta0;
    st.xi = data.xi0;
    st.p = data.p0;
    st.omega = trace_field(sim.reg, data.eta0);
    st.zeta = trace_field(sim.reg, data.xi0);
    st.phi = solve_ale_map(ap1, g, st.omega);
    st.time = 0.0;

    Eigen::VectorXd etad0 = regularize_nodal(sim.reg, data.eta0);
    GeomCertificate cert =
        certify_geometry(sim.disk_p1, etad0, st.phi, g, st.omega, sim.cfg.thresholds);
    if (!cert.pass) throw std::invalid_argument("initial datum rejected: " + cert.failure);

    // Weighted L2 projection of u0 onto the discretely divergence-free
    // subspace at the initial geometry, with the step's multiplier space.
    std::vector<int> u_free;
    auto outer = fl.boundary_dofs(BoundaryTag::Outer);
    int nfree = build_free_index(fl.ndof, outer, u_free);
    const int nu = 2 * nfree;
    const int ntot = nu + ap1.ndof;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ntot);
    auto gu = [&](int dof, int c) { return u_free[dof] < 0 ? -1 : 2 * u_free[dof] + c; };
    auto add = [&](int r, int c, double v) {
        if (r >= 0 && c >= 0 && v != 0.0) trip.emplace_back(r, c, v);
    };

    const QuadRule& qr5 = tri_rule_deg5();
    for (int e = 0; e < fl.mesh->num_tris(); ++e) {
        const double area = fl.mesh->tri_area(e);
        const Eigen::Matrix2d gphi = st.phi.grad(e);
        const double j = gphi.determinant();
        const Eigen::Matrix2d ginv = gphi.inverse();
        const auto gl = fl.grad_lambda(e);
        const auto& fd = fl.elem_dofs[e];
        const auto& pd = ap1.elem_dofs[e];
        for (int q = 0; q < qr5.size(); ++q) {
            const Eigen::Vector3d& bq = qr5.bary[q];
            const double w = qr5.w[q] * area * j;
            Eigen::VectorXd n6 = fl.shape(bq);
            Eigen::MatrixXd gt = fl.shape_grad(bq, gl) * ginv;
            Eigen::Vector2d u0q{0.0, 0.0};
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 2; ++c) u0q[c] += n6[a] * data.u0[2 * fd[a] + c];
            for (int a = 0; a < 6; ++a)
                for (int ca = 0; ca < 2; ++ca) {
                    int ra = gu(fd[a], ca);
                    if (ra < 0) continue;
                    b[ra] += w * n6[a] * u0q[ca];
                    for (int bl = 0; bl < 6; ++bl) add(ra, gu(fd[bl], ca), w * n6[a] * n6[bl]);
                    for (int k = 0; k < 3; ++k) {
                        add(ra, nu + pd[k], w * bq[k] * gt(a, ca));
                        add(nu + pd[k], ra, w * bq[k] * gt(a, ca));
                    }
                }
        }
    }
    Eigen::SparseMatrix<double> a_mat(ntot, ntot);
    a_mat.setFromTriplets(trip.begin(), trip.end());
    a_mat.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a_mat);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("initial velocity projection failed to factorize");
    Eigen::VectorXd x = lu.solve(b);

    st.u = Eigen::VectorXd::Zero(2 * fl.ndof);
    for (int d = 0; d < fl.ndof; ++d)
        if (u_free[d] >= 0)
            for (int c = 0; c < 2; ++c) st.u[2 * d + c] = x[2 * u_free[d] + c];
    return st;
}

Trajectory run(const Simulation& sim, State& st) {
    const InterfaceGrid& g = sim.grid;
    const RunConfig& cfg = sim.cfg;
    const double dt = cfg.dt;
    const int nsteps = cfg.steps();

    Trajectory tr;
    tr.dt = dt;
    tr.omega0 = st.omega;
    tr.zeta0 = st.zeta;
    tr.energy0 = total_energy(sim.fluid, st.phi, st.u, sim.disk_p1, st.xi, st.eta, st.p, g,
                              st.omega, st.zeta, cfg.prm)
                     .total();
    tr.records.reserve(nsteps);

    for (int n = 0; n < nsteps; ++n) {
        PlateStepResult plate = solve_plate_step(g, st.omega, st.zeta, dt);
        double pres = plate_identity_residual(g, cfg.prm.h, dt, st.omega, st.zeta, plate);

        ALEMap phi_np1 = solve_ale_map(sim.ann_p1, g, plate.omega);
        Eigen::VectorXd etadn = regularize_nodal(sim.reg, st.eta);
        GeomCertificate cert =
            certify_geometry(sim.disk_p1, etadn, phi_np1, g, plate.omega, cfg.thresholds);
        if (!cert.pass) {
            tr.outcome = Outcome::PartialGeometry;
            tr.failure = cert.failure;
            tr.steps_done = n;
            return tr;
        }

        BiotFluidInputs in;
        in.fluid = &sim.fluid;
        in.ann_p1 = &sim.ann_p1;
        in.disk_p1 = &sim.disk_p1;
        in.grid = &g;
        in.reg = &sim.reg;
        in.prm = cfg.prm;
        in.dt = dt;
        in.u_n = &st.u;
        in.eta_n = &st.eta;
        in.xi_n = &st.xi;
        in.p_n = &st.p;
        in.zeta_half = &plate.zeta;
        in.omega_n = &st.omega;
        in.phi_n = &st.phi;
        in.phi_np1 = &phi_np1;

        StepSystem sys = assemble_step(in);
        StepResult out = solve_step(in, sys);

        StepRecord rec;
        rec.n = n;
        rec.time = st.time + dt;
        rec.e_prev = total_energy(sim.fluid, st.phi, st.u, sim.disk_p1, st.xi, st.eta, st.p, g,
                                  st.omega, st.zeta, cfg.prm)
                         .total();
        rec.e_half = total_energy(sim.fluid, st.phi, st.u, sim.disk_p1, st.xi, st.eta, st.p, g,
                                  plate.omega, plate.zeta, cfg.prm)
                         .total();
        rec.energy = total_energy(sim.fluid, phi_np1, out.u, sim.disk_p1, out.xi, out.eta, out.p,
                                  g, plate.omega, out.zeta, cfg.prm);
        rec.dissipation =
            biot_dissipation(in, sys, out) +
            dt * cfg.prm.h * plate_l2norm2(g, plate_laplacian(g, plate.zeta));
        rec.plate_residual = pres;
        rec.biot_residual = biot_identity_residual(in, sys, out, plate.omega);
        rec.solver_residual = out.residual;
        PlateField reta;
        for (int c = 0; c < 2; ++c) reta.c[c] = sys.R * component(out.eta, c);
        rec.drift = std::sqrt(plate_l2norm2(g, plate_axpy(-1.0, reta, plate.omega)));
        rec.cert = cert;
        rec.omega = plate.omega;
        rec.zeta = out.zeta;
        rec.zeta_half = plate.zeta;
        tr.records.push_back(std::move(rec));

        st.u = out.u;
        st.eta = out.eta;
        st.xi = out.xi;
        st.p = out.p;
        st.omega = plate.omega;
        st.zeta = out.zeta;
        st.phi = phi_np1;
        st.time += dt;
    }
    tr.steps_done = nsteps;
    return tr;
}

namespace {

// Index of the step interval containing t: records[i] spans (i*dt, (i+1)*dt].
int interval_of(const Trajectory& tr, double t) {
    int n = static_cast<int>(std::ceil(t / tr.dt)) - 1;
    if (n < 0) n = 0;
    int last = static_cast<int>(tr.records.size()) - 1;
    if (n > last) n = last;
    return n;
}

}  // namespace

PlateField omega_pc(const Trajectory& tr, double t) {
    if (tr.records.empty() || t <= 0.0) return tr.omega0;
    return tr.records[interval_of(tr, t)].omega;
}

PlateField omega_linear(const Trajectory& tr, double t) {
    if (tr.records.empty() || t <= 0.0) return tr.omega0;
    int n = interval_of(tr, t);
    const PlateField& hi = tr.records[n].omega;
    const PlateField& lo = n == 0 ? tr.omega0 : tr.records[n - 1].omega;
    double s = (t - n * tr.dt) / tr.dt;
    if (s < 0.0) s = 0.0;
    if (s > 1.0) s = 1.0;
    PlateField diff = plate_axpy(-1.0, lo, hi);  // hi - lo
    return plate_axpy(s, diff, lo);
}

PlateField zeta_star(const Trajectory& tr, double t) {
    if (tr.records.empty() || t <= 0.0) return tr.zeta0;
    return tr.records[interval_of(tr, t)].zeta_half;
}

}  // namespace fpsi
