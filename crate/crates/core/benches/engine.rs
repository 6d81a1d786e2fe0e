//! Sequential versus data-parallel execution of the two engines and a
//! small sweep.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use coupled_cavities::lindblad::integrate_reduced;
use coupled_cavities::sweeps::{preset_with, run_sweep, GridOverrides};
use coupled_cavities::{
    simulate, AtomicInitialState, DissipationParams, Exec, FullDensity, FullSpace, IntegratorOptions, Liouvillian,
    ModelParams, TimeGrid, UnitaryOptions,
};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn unitary(c: &mut Criterion) {
    let mut group = c.benchmark_group("unitary");
    let grid = TimeGrid::linspace(50.0, 500).unwrap();
    for n_bar in [1.0, 5.0] {
        let p = ModelParams::symmetric(10.0, 15.0, n_bar);
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n_bar), &p, |b, p| {
                b.iter(|| {
                    simulate(
                        black_box(p),
                        AtomicInitialState::E1G2,
                        &grid,
                        &UnitaryOptions { cutoff: None, exec },
                    )
                })
            });
        }
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let grid = GridOverrides {
        axis_samples: 16,
        ..GridOverrides::default()
    };
    let spec = preset_with("fig2", &grid).unwrap().remove(0);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| run_sweep(black_box(&spec), exec)));
    }
    group.finish();
}

fn lindblad(c: &mut Criterion) {
    let mut group = c.benchmark_group("lindblad");
    group.sample_size(10);
    let space = FullSpace::new(5);
    let p = ModelParams::symmetric(0.0, 10.0, 0.1);
    let d = DissipationParams::from_cooperativity(10.0, 0.1, 0.1).unwrap();
    let (rho0, _) = FullDensity::thermal_product(space.clone(), AtomicInitialState::E1G2, 0.1, 0.1).unwrap();
    let l = Liouvillian::new(&p, &d, space).unwrap();
    let grid = TimeGrid::linspace(5.0, 50).unwrap();
    group.bench_function("rk4", |b| {
        b.iter(|| integrate_reduced(&l, black_box(&rho0), &grid, &IntegratorOptions::default()))
    });
    group.finish();
}

criterion_group!(benches, unitary, sweep, lindblad);
criterion_main!(benches);
