use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shpattern_bench::{field, lattice, params};
use shpattern_core::direct::{BoundedStepper, Scheme, SolverConfig, SpectralStepper};
use shpattern_core::model::rk4_step;
use shpattern_core::{BoundaryForcing, ForcingKind};

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral_step");
    for n in [8, 32, 128] {
        let p = params(n);
        let start = field(&p, true);
        let mut stepper = SpectralStepper::for_grid(&start, &p, 0.1, true).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n * p.m_samples), &n, |b, _| {
            let mut grid = start.clone();
            b.iter(|| stepper.step(&mut grid).unwrap())
        });
    }
    group.finish();
}

fn bounded(c: &mut Criterion) {
    let mut group = c.benchmark_group("bounded_step");
    for n in [8, 32, 128] {
        let p = params(n);
        let start = field(&p, false);
        let forcing = BoundaryForcing::homogeneous(ForcingKind::EvenGiven, &p);
        let config = SolverConfig {
            dt: 0.5 * start.dx * start.dx,
            scheme: Scheme::BoundedImex,
            ..SolverConfig::default()
        };
        let mut stepper = BoundedStepper::new(&start, &p, &forcing, &config).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(start.len()), &n, |b, _| {
            let mut grid = start.clone();
            b.iter(|| stepper.step(&mut grid).unwrap())
        });
    }
    group.finish();
}

fn lattice_rk4(c: &mut Criterion) {
    let mut group = c.benchmark_group("rk4_step");
    for n in [8, 64, 512] {
        let p = params(n);
        let state = lattice(n);
        let periodic = BoundaryForcing::periodic();
        group.bench_with_input(BenchmarkId::new("periodic", n), &n, |b, _| {
            b.iter(|| rk4_step(&state, &p, &periodic, 0.4).unwrap())
        });
        let walls = BoundaryForcing::homogeneous(ForcingKind::OddGiven, &p);
        group.bench_with_input(BenchmarkId::new("walls", n), &n, |b, _| {
            b.iter(|| rk4_step(&state, &p, &walls, 0.4).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spectral, bounded, lattice_rk4);
criterion_main!(benches);
