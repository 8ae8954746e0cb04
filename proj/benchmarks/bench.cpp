#include <benchmark/benchmark.h>

#include "fpsi/driver.hpp"

using namespace fpsi;

namespace {

RunConfig bench_config(int refine) {
    RunConfig rc;
    rc.refine = refine;
    rc.M = 64;
    rc.K = 8;
    rc.delta = 0.3;
    rc.dt = 0.05;
    rc.nsteps = 1;
    return rc;
}

struct BenchSetup {
    Simulation sim;
    State st;
    PlateStepResult plate;
    ALEMap phi_np1;

    explicit BenchSetup(int refine) : sim(bench_config(refine)) {
        Config cfg;
        st = initialize(sim, make_initial_data(sim, cfg));
        plate = solve_plate_step(sim.grid, st.omega, st.zeta, sim.cfg.dt);
        phi_np1 = solve_ale_map(sim.ann_p1, sim.grid, plate.omega);
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

void bm_assemble(benchmark::State& state) {
    BenchSetup s(static_cast<int>(state.range(0)));
    BiotFluidInputs in = s.inputs();
    for (auto _ : state) {
        StepSystem sys = assemble_step(in);
        benchmark::DoNotOptimize(sys.A);
    }
}
BENCHMARK(bm_assemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void bm_solve(benchmark::State& state) {
    BenchSetup s(static_cast<int>(state.range(0)));
    BiotFluidInputs in = s.inputs();
    StepSystem sys = assemble_step(in);
    for (auto _ : state) {
        StepResult out = solve_step(in, sys);
        benchmark::DoNotOptimize(out.u);
    }
}
BENCHMARK(bm_solve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void bm_ale_map(benchmark::State& state) {
    BenchSetup s(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        ALEMap phi = solve_ale_map(s.sim.ann_p1, s.sim.grid, s.plate.omega);
        benchmark::DoNotOptimize(phi.vals);
    }
}
BENCHMARK(bm_ale_map)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void bm_regularize(benchmark::State& state) {
    BenchSetup s(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        Eigen::VectorXd v = regularize_nodal(s.sim.reg, s.st.eta);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(bm_regularize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void bm_full_step(benchmark::State& state) {
    BenchSetup s(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        State st = s.st;
        Trajectory tr = run(s.sim, st);
        benchmark::DoNotOptimize(tr.records);
    }
}
BENCHMARK(bm_full_step)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
