#include "fpsi/biot_fluid_step.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace fpsi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SampleTrace {
    int fdof[3];   // fluid P2 dofs on the interface edge (a, b, mid)
    double fw[3];  // quadratic shape values at the sample
    int ddof[2];   // disk P1 dofs on the interface edge
    double dw[2];
};

// The samples z_j lie on interface edges of both meshes; on the fluid side
// the trace of a P2 function along an edge is the 1D quadratic through the
// two vertex dofs and the midside dof, parametrized by angle fraction.
std::vector<SampleTrace> build_sample_traces(const FESpace& fluid, const FESpace& disk_p1,
                                             const InterfaceGrid& g) {
    std::vector<const FESpace::BEdgeDofs*> fedges, dedges;
    for (const auto& be : fluid.bedge_dofs)
        if (be.tag == BoundaryTag::Interface) fedges.push_back(&be);
    for (const auto& be : disk_p1.bedge_dofs)
        if (be.tag == BoundaryTag::Interface) dedges.push_back(&be);
    const int s_f = static_cast<int>(fedges.size());
    const int s_d = static_cast<int>(dedges.size());

    std::vector<SampleTrace> tr(g.M);
    for (int j = 0; j < g.M; ++j) {
        double zf = g.z[j] / (kTwoPi / s_f);
        int ef = std::min(static_cast<int>(zf), s_f - 1);
        double t = zf - ef;
        tr[j].fdof[0] = fedges[ef]->a;
        tr[j].fdof[1] = fedges[ef]->b;
        tr[j].fdof[2] = fedges[ef]->mid;
        tr[j].fw[0] = (1.0 - t) * (1.0 - 2.0 * t);
        tr[j].fw[1] = t * (2.0 * t - 1.0);
        tr[j].fw[2] = 4.0 * t * (1.0 - t);

        double zd = g.z[j] / (kTwoPi / s_d);
        int ed = std::min(static_cast<int>(zd), s_d - 1);
        double td = zd - ed;
        tr[j].ddof[0] = dedges[ed]->a;
        tr[j].ddof[1] = dedges[ed]->b;
        tr[j].dw[0] = 1.0 - td;
        tr[j].dw[1] = td;
    }
    return tr;
}

Eigen::Vector2d trace_fluid(const SampleTrace& t, const Eigen::VectorXd& coeffs) {
    Eigen::Vector2d v{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        v.x() += t.fw[k] * coeffs[2 * t.fdof[k]];
        v.y() += t.fw[k] * coeffs[2 * t.fdof[k] + 1];
    }
    return v;
}

// D(phi_a e_ca) : D(phi_b e_cb) from the rows of a gradient table g.
double d_contract(const Eigen::MatrixXd& g, int a, int ca, int b, int cb) {
    double v = (ca == cb) ? 0.5 * g.row(a).dot(g.row(b)) : 0.0;
    v += 0.5 * g(a, cb) * g(b, ca);
    return v;
}

std::map<std::pair<int, int>, int> edge_to_tri(const Mesh2D& mesh) {
    std::map<std::pair<int, int>, int> out;
    for (int e = 0; e < mesh.num_tris(); ++e) {
        const auto& t = mesh.tris[e];
        for (int i = 0; i < 3; ++i) {
            int a = t[i], b = t[(i + 1) % 3];
            out[{std::min(a, b), std::max(a, b)}] = e;
        }
    }
    return out;
}

Eigen::VectorXd component(const Eigen::VectorXd& interleaved, int c) {
    int n = static_cast<int>(interleaved.size()) / 2;
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = interleaved[2 * i + c];
    return out;
}

double spectral_norm2x2(const Eigen::Matrix2d& m) {
    return m.jacobiSvd().singularValues()[0];
}

}  // namespace

StepSystem assemble_step(const BiotFluidInputs& in) {
    const FESpace& fl = *in.fluid;
    const FESpace& ap1 = *in.ann_p1;
    const FESpace& dp1 = *in.disk_p1;
    const InterfaceGrid& g = *in.grid;
    const double dt = in.dt;
    const Params& pr = in.prm;
    const int nd = dp1.ndof;

    StepSystem sys;
    auto outer = fl.boundary_dofs(BoundaryTag::Outer);
    sys.n_ufree = build_free_index(fl.ndof, outer, sys.u_free);
    sys.off_u = 0;
    sys.off_pi = 2 * sys.n_ufree;
    sys.off_eta = sys.off_pi + ap1.ndof;
    sys.off_p = sys.off_eta + 2 * nd;
    sys.ntot = sys.off_p + nd;

    sys.R = trace_operator(*in.reg);
    sys.Rt = fourier_evaluation_matrix(g) * sys.R;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(1 << 20);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.ntot);
    auto add = [&](int r, int c, double v) {
        if (r >= 0 && c >= 0 && v != 0.0) trip.emplace_back(r, c, v);
    };

    const Eigen::VectorXd& un = *in.u_n;
    const Eigen::VectorXd etadn = regularize_nodal(*in.reg, *in.eta_n);
    const Eigen::VectorXd w_ale = ale_velocity(*in.phi_np1, *in.phi_n, dt);

    // ---- annulus volume terms -------------------------------------------
    const QuadRule& qr5 = tri_rule_deg5();
    for (int e = 0; e < fl.mesh->num_tris(); ++e) {
        const double area = fl.mesh->tri_area(e);
        const Eigen::Matrix2d gphi = in.phi_n->grad(e);
        const double jn = gphi.determinant();
        const double jnp1 = in.phi_np1->jac(e);
        const Eigen::Matrix2d ginv = gphi.inverse();
        const auto gl = fl.grad_lambda(e);
        const auto& fd = fl.elem_dofs[e];
        const auto& pd = ap1.elem_dofs[e];

        for (int q = 0; q < qr5.size(); ++q) {
            const Eigen::Vector3d& bq = qr5.bary[q];
            const double w = qr5.w[q] * area;
            Eigen::VectorXd n6 = fl.shape(bq);
            Eigen::MatrixXd gt = fl.shape_grad(bq, gl) * ginv;  // transformed grads

            Eigen::Vector2d unq{0.0, 0.0}, wq_ale{0.0, 0.0};
            for (int a = 0; a < 6; ++a) {
                unq.x() += n6[a] * un[2 * fd[a]];
                unq.y() += n6[a] * un[2 * fd[a] + 1];
            }
            for (int k = 0; k < 3; ++k) {
                wq_ale.x() += bq[k] * w_ale[2 * pd[k]];
                wq_ale.y() += bq[k] * w_ale[2 * pd[k] + 1];
            }
            Eigen::Vector2d adv = unq - wq_ale;
            Eigen::VectorXd advg = gt * adv;  // (adv . grad^omega) phi_a

            const double cm = 0.5 * dt * dt * (jn + jnp1) * w;
            const double cv = 2.0 * pr.nu * dt * dt * dt * jn * w;
            const double cc = 0.5 * dt * dt * dt * jn * w;
            const double cd = dt * dt * dt * jn * w;

            for (int a = 0; a < 6; ++a)
                for (int ca = 0; ca < 2; ++ca) {
                    int ra = sys.gu(fd[a], ca);
                    if (ra < 0) continue;
                    b[ra] += dt * dt * jn * w * n6[a] * unq[ca];
                    for (int bl = 0; bl < 6; ++bl) {
                        add(ra, sys.gu(fd[bl], ca),
                            cm * n6[a] * n6[bl] + cc * (n6[a] * advg[bl] - n6[bl] * advg[a]));
                        for (int cb = 0; cb < 2; ++cb)
                            add(ra, sys.gu(fd[bl], cb), cv * d_contract(gt, a, ca, bl, cb));
                    }
                    for (int k = 0; k < 3; ++k) add(ra, sys.gpi(pd[k]), -cd * bq[k] * gt(a, ca));
                }
            for (int k = 0; k < 3; ++k)
                for (int bl = 0; bl < 6; ++bl)
                    for (int cb = 0; cb < 2; ++cb)
                        add(sys.gpi(pd[k]), sys.gu(fd[bl], cb), cd * bq[k] * gt(bl, cb));
        }
    }

    // ---- disk volume terms ----------------------------------------------
    const QuadRule& qr2 = tri_rule_deg2();
    std::vector<Eigen::Triplet<double>> atrip;  // alpha blocks before the regularizer
    for (int e = 0; e < dp1.mesh->num_tris(); ++e) {
        const double area = dp1.mesh->tri_area(e);
        const auto gl = dp1.grad_lambda(e);
        const auto& td = dp1.elem_dofs[e];
        const Eigen::Matrix2d f = lagrangian_grad(dp1, etadn, e);
        const double jt = f.determinant();
        const Eigen::Matrix<double, 3, 2> gt = gl * f.inverse();

        const double ce_d = (2.0 * pr.mu_e * dt * dt + 2.0 * pr.mu_v * dt) * area;
        const double ce_div = (pr.lambda_e * dt * dt + pr.lambda_v * dt) * area;
        const double cdarcy = pr.kappa * dt * dt * dt * jt * area;

        Eigen::Matrix2d ge = def_gradient(dp1, *in.eta_n, e);
        Eigen::Matrix2d de = 0.5 * (ge + ge.transpose());
        double dive = ge.trace();

        Eigen::MatrixXd gld = gl;
        for (int a = 0; a < 3; ++a) {
            for (int ca = 0; ca < 2; ++ca) {
                int ra = sys.geta(td[a], ca);
                b[ra] += 2.0 * pr.mu_v * dt * area * de.row(ca).dot(gl.row(a)) +
                         pr.lambda_v * dt * area * dive * gl(a, ca);
                for (int bl = 0; bl < 3; ++bl)
                    for (int cb = 0; cb < 2; ++cb)
                        add(ra, sys.geta(td[bl], cb),
                            ce_d * d_contract(gld, a, ca, bl, cb) +
                                ce_div * gl(a, ca) * gl(bl, cb));
            }
            for (int bl = 0; bl < 3; ++bl) {
                add(sys.gp(td[a]), sys.gp(td[bl]), cdarcy * gt.row(a).dot(gt.row(bl)));
                // alpha volume block: -alpha dt^2 int J^theta psi . grad^theta r
                for (int cb = 0; cb < 2; ++cb)
                    atrip.emplace_back(td[a], 2 * td[bl] + cb,
                                       -pr.alpha * dt * dt * jt * (area / 3.0) * gt(a, cb));
            }
        }

        for (int q = 0; q < qr2.size(); ++q) {
            const Eigen::Vector3d& bq = qr2.bary[q];
            const double w = qr2.w[q] * area;
            Eigen::Vector2d data{0.0, 0.0};
            double pnq = 0.0;
            for (int k = 0; k < 3; ++k) {
                data.x() += bq[k] * ((*in.eta_n)[2 * td[k]] + dt * (*in.xi_n)[2 * td[k]]);
                data.y() += bq[k] * ((*in.eta_n)[2 * td[k] + 1] + dt * (*in.xi_n)[2 * td[k] + 1]);
                pnq += bq[k] * (*in.p_n)[td[k]];
            }
            for (int a = 0; a < 3; ++a) {
                for (int ca = 0; ca < 2; ++ca) {
                    b[sys.geta(td[a], ca)] += pr.rho_b * w * bq[a] * data[ca];
                    for (int bl = 0; bl < 3; ++bl)
                        add(sys.geta(td[a], ca), sys.geta(td[bl], ca),
                            pr.rho_b * w * bq[a] * bq[bl]);
                }
                b[sys.gp(td[a])] += pr.c0 * dt * dt * w * bq[a] * pnq;
                for (int bl = 0; bl < 3; ++bl)
                    add(sys.gp(td[a]), sys.gp(td[bl]), pr.c0 * dt * dt * w * bq[a] * bq[bl]);
            }
        }
    }

    // alpha interface block: +alpha dt^2 int_Gamma (psi . conormal) r with the
    // piecewise Piola conormal J^theta F^-T N of the eta^delta geometry; the
    // elementwise divergence theorem then makes the three alpha blocks cancel
    // exactly in the quadratic form once the skew transpose is added below.
    {
        auto btris = edge_to_tri(*dp1.mesh);
        const EdgeRule& er = edge_rule_deg5();
        for (const auto& be : dp1.bedge_dofs) {
            if (be.tag != BoundaryTag::Interface) continue;
            int e = btris.at({std::min(be.a, be.b), std::max(be.a, be.b)});
            const Eigen::Matrix2d f = lagrangian_grad(dp1, etadn, e);
            const double jt = f.determinant();
            Eigen::Vector2d d = dp1.mesh->nodes[be.b] - dp1.mesh->nodes[be.a];
            double len = d.norm();
            Eigen::Vector2d nhat{d.y() / len, -d.x() / len};
            Eigen::Vector2d con = jt * f.inverse().transpose() * nhat;
            int dofs[2] = {be.a, be.b};
            for (size_t q = 0; q < er.t.size(); ++q) {
                double t = er.t[q], w = er.w[q] * len;
                double sh[2] = {1.0 - t, t};
                for (int a = 0; a < 2; ++a)
                    for (int k = 0; k < 2; ++k)
                        for (int c = 0; c < 2; ++c)
                            atrip.emplace_back(dofs[a], 2 * dofs[k] + c,
                                               pr.alpha * dt * dt * w * sh[a] * sh[k] * con[c]);
            }
        }
    }

    // fold the regularizer into the alpha blocks, add the skew transpose and
    // the data part (the alpha coupling acts on eta^{n+1} - eta^n)
    {
        Eigen::SparseMatrix<double> btil(nd, 2 * nd);
        btil.setFromTriplets(atrip.begin(), atrip.end());
        std::vector<Eigen::Triplet<double>> strip;
        for (int r = 0; r < in.reg->S_nodes.outerSize(); ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(in.reg->S_nodes,
                                                                                r);
                 it; ++it)
                for (int c = 0; c < 2; ++c)
                    strip.emplace_back(2 * static_cast<int>(it.row()) + c,
                                       2 * static_cast<int>(it.col()) + c, it.value());
        Eigen::SparseMatrix<double> s_int(2 * nd, 2 * nd);
        s_int.setFromTriplets(strip.begin(), strip.end());
        Eigen::SparseMatrix<double> bs = btil * s_int;
        for (int o = 0; o < bs.outerSize(); ++o)
            for (Eigen::SparseMatrix<double>::InnerIterator it(bs, o); it; ++it) {
                int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
                add(sys.gp(r), sys.off_eta + c, it.value());
                add(sys.off_eta + c, sys.gp(r), -it.value());
                b[sys.gp(r)] += it.value() * (*in.eta_n)[c];
            }
    }

    // ---- interface terms --------------------------------------------------
    // One frame for all coupling terms, at omega^n, with the weak-form normal
    // pointing outward from the fluid: nI = -(tau_y, -tau_x).
    const InterfaceFrame frame = interface_frame(g, *in.omega_n);
    const auto traces = build_sample_traces(fl, dp1, g);
    const double wq = kTwoPi / g.M;

    std::vector<int> acols;
    for (int m = 0; m < nd; ++m)
        if ((sys.R.col(m).array() != 0.0).any()) acols.push_back(m);
    const int na = static_cast<int>(acols.size());

    Eigen::MatrixXd ra(g.ncoef(), na);
    for (int i = 0; i < na; ++i) ra.col(i) = sys.R.col(acols[i]);
    Eigen::MatrixXd rta = fourier_evaluation_matrix(g) * ra;  // M x na

    // plate inertia block h R^T M R and its data terms
    Eigen::VectorXd mc = fourier_mass_diagonal(g);
    Eigen::MatrixXd dee = Eigen::MatrixXd::Zero(2 * na, 2 * na);
    {
        Eigen::MatrixXd pm = ra.transpose() * (pr.h * mc).asDiagonal() * ra;
        for (int i = 0; i < na; ++i)
            for (int k = 0; k < na; ++k)
                for (int c = 0; c < 2; ++c) dee(2 * i + c, 2 * k + c) += pm(i, k);
        for (int c = 0; c < 2; ++c) {
            Eigen::VectorXd en_c = component(*in.eta_n, c);
            Eigen::VectorXd coef = pr.h * mc.cwiseProduct(sys.R * en_c) +
                                   dt * pr.h * mc.cwiseProduct(in.zeta_half->c[c]);
            Eigen::VectorXd rhs = ra.transpose() * coef;
            for (int i = 0; i < na; ++i) b[sys.geta(acols[i], c)] += rhs[i];
        }
    }

    Eigen::VectorXd etadn_s[2];  // eta^{delta,n} trace samples
    for (int c = 0; c < 2; ++c) etadn_s[c] = sys.Rt * component(*in.eta_n, c);

    for (int j = 0; j < g.M; ++j) {
        const SampleTrace& t = traces[j];
        const Eigen::Vector2d nI{-frame.nx[j], -frame.ny[j]};
        const Eigen::Vector2d tau{frame.tx[j], frame.ty[j]};
        const double s = frame.S[j];
        const Eigen::Vector2d unt = trace_fluid(t, un);
        const double hdn_n = etadn_s[0][j] * nI.x() + etadn_s[1][j] * nI.y();
        const double hdn_t = etadn_s[0][j] * tau.x() + etadn_s[1][j] * tau.y();

        for (int a = 0; a < 3; ++a)
            for (int ca = 0; ca < 2; ++ca) {
                int rv = sys.gu(t.fdof[a], ca);
                // advective boundary flux (1/2)((dt u - eta^delta).nI)(u^n . v)
                // and its skew partner rows, plus the data share
                b[rv] += -wq * 0.5 * dt * dt * hdn_n * unt[ca] * t.fw[a];
                for (int bl = 0; bl < 3; ++bl)
                    for (int cb = 0; cb < 2; ++cb)
                        add(rv, sys.gu(t.fdof[bl], cb),
                            wq * 0.5 * dt * dt * dt * t.fw[bl] * nI[cb] * unt[ca] * t.fw[a] -
                                wq * 0.5 * dt * dt * dt * t.fw[a] * nI[ca] * unt[cb] * t.fw[bl]);
                for (int i = 0; i < na; ++i)
                    for (int c = 0; c < 2; ++c) {
                        double rjm = rta(j, i);
                        add(rv, sys.geta(acols[i], c),
                            -wq * 0.5 * dt * dt * rjm * nI[c] * unt[ca] * t.fw[a]);
                        add(sys.geta(acols[i], c), rv,
                            wq * 0.5 * dt * dt * rjm * nI[c] * unt[ca] * t.fw[a]);
                    }
                // normal exchange with the pore pressure
                for (int d = 0; d < 2; ++d) {
                    add(rv, sys.gp(t.ddof[d]), wq * dt * dt * dt * t.fw[a] * nI[ca] * t.dw[d]);
                    add(sys.gp(t.ddof[d]), rv, -wq * dt * dt * dt * t.dw[d] * nI[ca] * t.fw[a]);
                }
            }
        for (int d = 0; d < 2; ++d) {
            b[sys.gp(t.ddof[d])] += wq * dt * dt * t.dw[d] * hdn_n;
            for (int i = 0; i < na; ++i)
                for (int c = 0; c < 2; ++c) {
                    add(sys.gp(t.ddof[d]), sys.geta(acols[i], c),
                        wq * dt * dt * t.dw[d] * nI[c] * rta(j, i));
                    add(sys.geta(acols[i], c), sys.gp(t.ddof[d]),
                        -wq * dt * dt * rta(j, i) * nI[c] * t.dw[d]);
                }
        }

        // slip friction on ((eta^{delta,n+1} - eta^{delta,n})/dt - u) . tau
        const double cb = pr.beta * dt * wq / s;
        for (int i = 0; i < na; ++i)
            for (int c = 0; c < 2; ++c) {
                double gi = rta(j, i) * tau[c];
                for (int k = 0; k < na; ++k)
                    for (int c2 = 0; c2 < 2; ++c2)
                        dee(2 * i + c, 2 * k + c2) += cb * gi * rta(j, k) * tau[c2];
                for (int bl = 0; bl < 3; ++bl)
                    for (int cu = 0; cu < 2; ++cu) {
                        double gv = -dt * t.fw[bl] * tau[cu];
                        add(sys.geta(acols[i], c), sys.gu(t.fdof[bl], cu), cb * gi * gv);
                        add(sys.gu(t.fdof[bl], cu), sys.geta(acols[i], c), cb * gv * gi);
                    }
                b[sys.geta(acols[i], c)] += cb * hdn_t * gi;
            }
        for (int a = 0; a < 3; ++a)
            for (int ca = 0; ca < 2; ++ca) {
                double ga = -dt * t.fw[a] * tau[ca];
                for (int bl = 0; bl < 3; ++bl)
                    for (int cu = 0; cu < 2; ++cu)
                        add(sys.gu(t.fdof[a], ca), sys.gu(t.fdof[bl], cu),
                            cb * ga * (-dt * t.fw[bl] * tau[cu]));
                b[sys.gu(t.fdof[a], ca)] += cb * hdn_t * ga;
            }
    }

    for (int i = 0; i < na; ++i)
        for (int k = 0; k < na; ++k)
            for (int c = 0; c < 2; ++c)
                for (int c2 = 0; c2 < 2; ++c2)
                    add(sys.geta(acols[i], c), sys.geta(acols[k], c2), dee(2 * i + c, 2 * k + c2));

    sys.A.resize(sys.ntot, sys.ntot);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.b = std::move(b);
    return sys;
}

StepResult solve_step(const BiotFluidInputs& in, const StepSystem& sys) {
    const double dt = in.dt;
    Eigen::VectorXd scale(sys.ntot);
    double s3 = 1.0 / (dt * dt * dt), s2 = 1.0 / (dt * dt);
    for (int i = 0; i < sys.ntot; ++i)
        scale[i] = (i >= sys.off_eta && i < sys.off_p) ? s2 : s3;

    Eigen::SparseMatrix<double> a_s = scale.asDiagonal() * sys.A;
    Eigen::VectorXd b_s = scale.cwiseProduct(sys.b);
    a_s.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a_s);
    if (lu.info() != Eigen::Success) throw std::runtime_error("step system factorization failed");
    Eigen::VectorXd x = lu.solve(b_s);

    StepResult out;
    out.residual = (a_s * x - b_s).norm() / std::max(b_s.norm(), 1e-300);

    const int nd = in.disk_p1->ndof;
    out.u = Eigen::VectorXd::Zero(2 * in.fluid->ndof);
    for (int d = 0; d < in.fluid->ndof; ++d)
        if (sys.u_free[d] >= 0)
            for (int c = 0; c < 2; ++c) out.u[2 * d + c] = x[2 * sys.u_free[d] + c];
    out.pi = x.segment(sys.off_pi, in.ann_p1->ndof);
    out.eta = x.segment(sys.off_eta, 2 * nd);
    out.p = x.segment(sys.off_p, nd);
    out.xi = (out.eta - *in.eta_n) / dt;
    for (int c = 0; c < 2; ++c) out.zeta.c[c] = sys.R * component(out.xi, c);
    return out;
}

Eigen::VectorXd pack_state(const StepSystem& sys, const Eigen::VectorXd& u_full,
                           const Eigen::VectorXd& pi, const Eigen::VectorXd& eta,
                           const Eigen::VectorXd& p) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.ntot);
    for (int d = 0; d < static_cast<int>(sys.u_free.size()); ++d)
        if (sys.u_free[d] >= 0)
            for (int c = 0; c < 2; ++c) x[2 * sys.u_free[d] + c] = u_full[2 * d + c];
    x.segment(sys.off_pi, pi.size()) = pi;
    x.segment(sys.off_eta, eta.size()) = eta;
    x.segment(sys.off_p, p.size()) = p;
    return x;
}

double coercivity_reference(const BiotFluidInputs& in, const StepSystem& sys,
                            const Eigen::VectorXd& x) {
    const FESpace& fl = *in.fluid;
    const FESpace& dp1 = *in.disk_p1;
    const InterfaceGrid& g = *in.grid;
    const double dt = in.dt;
    const Params& pr = in.prm;
    const int nd = dp1.ndof;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * fl.ndof);
    for (int d = 0; d < fl.ndof; ++d)
        if (sys.u_free[d] >= 0)
            for (int c = 0; c < 2; ++c) u[2 * d + c] = x[2 * sys.u_free[d] + c];
    Eigen::VectorXd eta = x.segment(sys.off_eta, 2 * nd);
    Eigen::VectorXd p = x.segment(sys.off_p, nd);

    double val = 0.0;

    const QuadRule& qr5 = tri_rule_deg5();
    for (int e = 0; e < fl.mesh->num_tris(); ++e) {
        const double area = fl.mesh->tri_area(e);
        const Eigen::Matrix2d gphi = in.phi_n->grad(e);
        const double jn = gphi.determinant();
        const double jnp1 = in.phi_np1->jac(e);
        const Eigen::Matrix2d ginv = gphi.inverse();
        const auto gl = fl.grad_lambda(e);
        const auto& fd = fl.elem_dofs[e];
        for (int q = 0; q < qr5.size(); ++q) {
            const double w = qr5.w[q] * area;
            Eigen::VectorXd n6 = fl.shape(qr5.bary[q]);
            Eigen::MatrixXd gt = fl.shape_grad(qr5.bary[q], gl) * ginv;
            Eigen::Vector2d uq{0.0, 0.0};
            Eigen::Matrix2d gu = Eigen::Matrix2d::Zero();
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 2; ++c) {
                    uq[c] += n6[a] * u[2 * fd[a] + c];
                    gu.row(c) += u[2 * fd[a] + c] * gt.row(a);
                }
            Eigen::Matrix2d du = 0.5 * (gu + gu.transpose());
            val += 0.5 * dt * dt * (jn + jnp1) * w * uq.squaredNorm();
            val += 2.0 * pr.nu * dt * dt * dt * jn * w * du.squaredNorm();
        }
    }

    const Eigen::VectorXd etadn = regularize_nodal(*in.reg, *in.eta_n);
    for (int e = 0; e < dp1.mesh->num_tris(); ++e) {
        const double area = dp1.mesh->tri_area(e);
        const auto gl = dp1.grad_lambda(e);
        const auto& td = dp1.elem_dofs[e];
        const Eigen::Matrix2d f = lagrangian_grad(dp1, etadn, e);
        const double jt = f.determinant();
        const Eigen::Matrix<double, 3, 2> gt = gl * f.inverse();
        Eigen::Vector2d gp{0.0, 0.0};
        Eigen::Matrix2d geta = Eigen::Matrix2d::Zero();
        for (int a = 0; a < 3; ++a) {
            gp += p[td[a]] * gt.row(a).transpose();
            for (int c = 0; c < 2; ++c) geta.row(c) += eta[2 * td[a] + c] * gl.row(a);
        }
        Eigen::Matrix2d deta = 0.5 * (geta + geta.transpose());
        val += pr.kappa * dt * dt * dt * jt * area * gp.squaredNorm();
        val += (2.0 * pr.mu_e * dt * dt + 2.0 * pr.mu_v * dt) * area * deta.squaredNorm();
        val += (pr.lambda_e * dt * dt + pr.lambda_v * dt) * area * geta.trace() * geta.trace();
    }

    val += pr.rho_b * vector_l2norm2(dp1, eta);
    val += pr.c0 * dt * dt * scalar_l2norm2(dp1, p);

    // plate inertia and slip friction at the samples
    Eigen::VectorXd mc = fourier_mass_diagonal(g);
    Eigen::MatrixXd ev = fourier_evaluation_matrix(g);
    Eigen::VectorXd rs[2];
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd rc = sys.R * component(eta, c);
        val += pr.h * rc.cwiseProduct(mc.cwiseProduct(rc)).sum();
        rs[c] = ev * rc;
    }
    const InterfaceFrame frame = interface_frame(g, *in.omega_n);
    const auto traces = build_sample_traces(fl, dp1, g);
    const double wq = kTwoPi / g.M;
    for (int j = 0; j < g.M; ++j) {
        Eigen::Vector2d tau{frame.tx[j], frame.ty[j]};
        Eigen::Vector2d ut = trace_fluid(traces[j], u);
        double slip = (rs[0][j] - dt * ut.x()) * tau.x() + (rs[1][j] - dt * ut.y()) * tau.y();
        val += pr.beta * dt * wq / frame.S[j] * slip * slip;
    }
    return val;
}

DarcyBound darcy_bound(const BiotFluidInputs& in, const Eigen::VectorXd& p) {
    const FESpace& dp1 = *in.disk_p1;
    const Eigen::VectorXd etadn = regularize_nodal(*in.reg, *in.eta_n);
    const double k3 = in.prm.kappa * in.dt * in.dt * in.dt;
    DarcyBound out;
    double c1 = 1e300, c2 = 0.0, flat = 0.0;
    for (int e = 0; e < dp1.mesh->num_tris(); ++e) {
        const double area = dp1.mesh->tri_area(e);
        const auto gl = dp1.grad_lambda(e);
        const auto& td = dp1.elem_dofs[e];
        const Eigen::Matrix2d f = lagrangian_grad(dp1, etadn, e);
        const double jt = f.determinant();
        const Eigen::Matrix<double, 3, 2> gt = gl * f.inverse();
        Eigen::Vector2d gp{0.0, 0.0}, gpt{0.0, 0.0};
        for (int a = 0; a < 3; ++a) {
            gp += p[td[a]] * gl.row(a).transpose();
            gpt += p[td[a]] * gt.row(a).transpose();
        }
        out.darcy_term += k3 * jt * area * gpt.squaredNorm();
        flat += area * gp.squaredNorm();
        c1 = std::min(c1, jt);
        c2 = std::max(c2, spectral_norm2x2(f));
    }
    out.lower_bound = k3 * c1 / (c2 * c2) * flat;
    return out;
}

double fluid_weighted_l2(const FESpace& fluid, const ALEMap& phi, const Eigen::VectorXd& u) {
    const QuadRule& qr5 = tri_rule_deg5();
    double val = 0.0;
    for (int e = 0; e < fluid.mesh->num_tris(); ++e) {
        const double area = fluid.mesh->tri_area(e);
        const double j = phi.jac(e);
        const auto& fd = fluid.elem_dofs[e];
        for (int q = 0; q < qr5.size(); ++q) {
            Eigen::VectorXd n6 = fluid.shape(qr5.bary[q]);
            Eigen::Vector2d uq{0.0, 0.0};
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 2; ++c) uq[c] += n6[a] * u[2 * fd[a] + c];
            val += qr5.w[q] * area * j * uq.squaredNorm();
        }
    }
    return val;
}

double vector_l2norm2(const FESpace& p1, const Eigen::VectorXd& v) {
    const QuadRule& qr2 = tri_rule_deg2();
    double val = 0.0;
    for (int e = 0; e < p1.mesh->num_tris(); ++e) {
        const double area = p1.mesh->tri_area(e);
        const auto& td = p1.elem_dofs[e];
        for (int q = 0; q < qr2.size(); ++q) {
            Eigen::Vector2d vq{0.0, 0.0};
            for (int k = 0; k < 3; ++k)
                for (int c = 0; c < 2; ++c) vq[c] += qr2.bary[q][k] * v[2 * td[k] + c];
            val += qr2.w[q] * area * vq.squaredNorm();
        }
    }
    return val;
}

double scalar_l2norm2(const FESpace& p1, const Eigen::VectorXd& v) {
    const QuadRule& qr2 = tri_rule_deg2();
    double val = 0.0;
    for (int e = 0; e < p1.mesh->num_tris(); ++e) {
        const double area = p1.mesh->tri_area(e);
        const auto& td = p1.elem_dofs[e];
        for (int q = 0; q < qr2.size(); ++q) {
            double vq = 0.0;
            for (int k = 0; k < 3; ++k) vq += qr2.bary[q][k] * v[td[k]];
            val += qr2.w[q] * area * vq * vq;
        }
    }
    return val;
}

ElasticNorms elastic_norms(const FESpace& disk_p1, const Eigen::VectorXd& eta) {
    ElasticNorms out;
    for (int e = 0; e < disk_p1.mesh->num_tris(); ++e) {
        const double area = disk_p1.mesh->tri_area(e);
        Eigen::Matrix2d ge = def_gradient(disk_p1, eta, e);
        Eigen::Matrix2d de = 0.5 * (ge + ge.transpose());
        out.d_norm2 += area * de.squaredNorm();
        out.div_norm2 += area * ge.trace() * ge.trace();
    }
    return out;
}

EnergyTerms total_energy(const FESpace& fluid_sp, const ALEMap& phi, const Eigen::VectorXd& u,
                         const FESpace& disk_p1, const Eigen::VectorXd& xi,
                         const Eigen::VectorXd& eta, const Eigen::VectorXd& p,
                         const InterfaceGrid& grid, const PlateField& omega,
                         const PlateField& zeta, const Params& prm) {
    EnergyTerms out;
    out.fluid = 0.5 * fluid_weighted_l2(fluid_sp, phi, u);
    out.biot_kinetic = 0.5 * prm.rho_b * vector_l2norm2(disk_p1, xi);
    out.plate_kinetic = 0.5 * prm.h * plate_l2norm2(grid, zeta);
    out.plate_bending = 0.5 * prm.h * plate_l2norm2(grid, plate_laplacian(grid, omega));
    ElasticNorms en = elastic_norms(disk_p1, eta);
    out.elastic_d = prm.mu_e * en.d_norm2;
    out.elastic_div = 0.5 * prm.lambda_e * en.div_norm2;
    out.pressure = 0.5 * prm.c0 * scalar_l2norm2(disk_p1, p);
    return out;
}

double biot_dissipation(const BiotFluidInputs& in, const StepSystem& sys, const StepResult& out) {
    const FESpace& fl = *in.fluid;
    const FESpace& dp1 = *in.disk_p1;
    const InterfaceGrid& g = *in.grid;
    const double dt = in.dt;
    const Params& pr = in.prm;

    double viscous = 0.0;
    const QuadRule& qr5 = tri_rule_deg5();
    for (int e = 0; e < fl.mesh->num_tris(); ++e) {
        const double area = fl.mesh->tri_area(e);
        const Eigen::Matrix2d gphi = in.phi_n->grad(e);
        const double jn = gphi.determinant();
        const Eigen::Matrix2d ginv = gphi.inverse();
        const auto gl = fl.grad_lambda(e);
        const auto& fd = fl.elem_dofs[e];
        for (int q = 0; q < qr5.size(); ++q) {
            Eigen::MatrixXd gt = fl.shape_grad(qr5.bary[q], gl) * ginv;
            Eigen::Matrix2d gu = Eigen::Matrix2d::Zero();
            for (int a = 0; a < 6; ++a)
                for (int c = 0; c < 2; ++c) gu.row(c) += out.u[2 * fd[a] + c] * gt.row(a);
            Eigen::Matrix2d du = 0.5 * (gu + gu.transpose());
            viscous += 2.0 * pr.nu * qr5.w[q] * area * jn * du.squaredNorm();
        }
    }

    double slip = 0.0;
    const InterfaceFrame frame = interface_frame(g, *in.omega_n);
    const auto traces = build_sample_traces(fl, dp1, g);
    const double wq = kTwoPi / g.M;
    Eigen::MatrixXd ev = fourier_evaluation_matrix(g);
    Eigen::VectorXd xs[2];
    for (int c = 0; c < 2; ++c) xs[c] = ev * (sys.R * component(out.xi, c));
    for (int j = 0; j < g.M; ++j) {
        Eigen::Vector2d tau{frame.tx[j], frame.ty[j]};
        Eigen::Vector2d ut = trace_fluid(traces[j], out.u);
        double rel = (xs[0][j] - ut.x()) * tau.x() + (xs[1][j] - ut.y()) * tau.y();
        slip += pr.beta * wq / frame.S[j] * rel * rel;
    }

    ElasticNorms en = elastic_norms(dp1, out.xi);
    double visco_solid = 2.0 * pr.mu_v * en.d_norm2 + pr.lambda_v * en.div_norm2;

    DarcyBound db = darcy_bound(in, out.p);
    double darcy = db.darcy_term / (dt * dt);  // kappa dt int J^theta |grad^theta p|^2

    return dt * (viscous + slip + visco_solid) + darcy;
}

double biot_identity_residual(const BiotFluidInputs& in, const StepSystem& sys,
                              const StepResult& out, const PlateField& omega_np1) {
    const Params& pr = in.prm;
    EnergyTerms e_half = total_energy(*in.fluid, *in.phi_n, *in.u_n, *in.disk_p1, *in.xi_n,
                                      *in.eta_n, *in.p_n, *in.grid, omega_np1, *in.zeta_half, pr);
    EnergyTerms e_np1 = total_energy(*in.fluid, *in.phi_np1, out.u, *in.disk_p1, out.xi, out.eta,
                                     out.p, *in.grid, omega_np1, out.zeta, pr);

    Eigen::VectorXd ujump = out.u - *in.u_n;
    Eigen::VectorXd xijump = out.xi - *in.xi_n;
    Eigen::VectorXd etajump = out.eta - *in.eta_n;
    Eigen::VectorXd pjump = out.p - *in.p_n;
    PlateField zjump = plate_axpy(-1.0, *in.zeta_half, out.zeta);
    ElasticNorms enj = elastic_norms(*in.disk_p1, etajump);

    double lhs = e_np1.total() + biot_dissipation(in, sys, out) +
                 0.5 * fluid_weighted_l2(*in.fluid, *in.phi_n, ujump) +
                 0.5 * pr.rho_b * vector_l2norm2(*in.disk_p1, xijump) +
                 0.5 * pr.h * plate_l2norm2(*in.grid, zjump) + pr.mu_e * enj.d_norm2 +
                 0.5 * pr.lambda_e * enj.div_norm2 +
                 0.5 * pr.c0 * scalar_l2norm2(*in.disk_p1, pjump);
    return std::abs(lhs - e_half.total());
}

}  // namespace fpsi
