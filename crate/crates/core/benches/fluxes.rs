//! Serial against parallel execution of one explicit step in 1D and 2D.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mcrelax::exec::Execution;
use mcrelax::flux::{FluxScheme, SchemeKind};
use mcrelax::mesh::gen_rect_periodic;
use mcrelax::solver1d::{Boundary1D, Grid1D, Solver1D};
use mcrelax::solver2d::{Solver2D, TimeStep};
use mcrelax::thermo::{bundled_database, SpeciesSet};
use mcrelax::verify::sampling::{random_riemann_states, trial_rng};

const MODES: [(&str, Execution); 2] = [("serial", Execution::Serial), ("parallel", Execution::Parallel)];

fn air() -> SpeciesSet {
    SpeciesSet::select(&bundled_database(), &["N2", "O2", "NO", "N", "O"]).unwrap()
}

fn step_1d(c: &mut Criterion) {
    let sp = air();
    let n = 4096;
    let states = random_riemann_states(&sp, &mut trial_rng(1, 0), 1, n, 0.1);
    let mut group = c.benchmark_group("solver1d_step");
    for kind in SchemeKind::ALL {
        for (name, exec) in MODES {
            let mut solver = Solver1D::new(&sp, Grid1D::new(n, 1e-3, Boundary1D::Periodic).unwrap(), FluxScheme::new(kind));
            solver.exec = exec;
            let dt = solver.cfl_dt(&states).unwrap();
            group.bench_with_input(BenchmarkId::new(kind.to_string(), name), &states, |b, s| {
                b.iter(|| black_box(solver.step(s, dt).unwrap()))
            });
        }
    }
    group.finish();
}

fn step_2d(c: &mut Criterion) {
    let sp = air();
    let mesh = gen_rect_periodic(64, 64, [0.0, 1.0, 0.0, 1.0]).unwrap();
    let states = random_riemann_states(&sp, &mut trial_rng(2, 0), 2, mesh.n_cells(), 0.1);
    let mut group = c.benchmark_group("solver2d_step");
    group.sample_size(20);
    for (name, exec) in MODES {
        let mut solver = Solver2D::new(&sp, &mesh, FluxScheme::new(SchemeKind::PressureRelax));
        solver.exec = exec;
        let dt = TimeStep::Global(solver.cfl_dt_global(&states).unwrap());
        group.bench_with_input(BenchmarkId::new("relax", name), &states, |b, s| {
            b.iter(|| black_box(solver.step(s, &dt).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, step_1d, step_2d);
criterion_main!(benches);
