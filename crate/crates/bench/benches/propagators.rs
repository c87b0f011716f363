use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use spinboson_core::dynamics::{reduced_dynamics, uniform_grid};
use spinboson_core::propagator::{ClosedFormSolver, OracleSolver};
use spinboson_core::{BathKind, FockSpace, Method, Mode, ModelParams, QubitState, C64};

fn single(d: usize) -> ModelParams {
    ModelParams::single_mode(0.8, 0.0, 1.0, C64::new(0.4, 0.0), d).unwrap()
}

fn two_mode(d: usize) -> ModelParams {
    let modes = vec![Mode::new(1.0, C64::new(0.3, 0.0)), Mode::new(1.7, C64::new(0.0, 0.2))];
    ModelParams::new(0.6, 0.0, modes, FockSpace::new(vec![d, d]).unwrap()).unwrap()
}

fn propagator_routes(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagator");
    for (label, params) in [("d32", single(32)), ("d64", single(64)), ("d8x8", two_mode(8))] {
        group.bench_with_input(BenchmarkId::new("closed_form", label), &params, |b, p| {
            b.iter(|| ClosedFormSolver::new(p).unwrap().propagator(black_box(5.0)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("oracle", label), &params, |b, p| {
            b.iter(|| OracleSolver::new(p).propagator(black_box(5.0)).unwrap())
        });
    }
    group.finish();
}

fn reduced(c: &mut Criterion) {
    let params = single(32);
    let rho0 = QubitState::from_bloch([1.0, 0.0, 0.0]).unwrap();
    let times = uniform_grid(20.0, 50).unwrap();
    let mut group = c.benchmark_group("reduced_dynamics");
    group.sample_size(10);
    for (label, kind) in [("vacuum", BathKind::Vacuum), ("thermal", BathKind::Thermal(2.0))] {
        let bath = kind.build(&params).unwrap();
        for method in [Method::ClosedForm, Method::Oracle] {
            group.bench_function(BenchmarkId::new(method.as_str(), label), |b| {
                b.iter(|| reduced_dynamics(&params, &rho0, &bath, &times, method).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, propagator_routes, reduced);
criterion_main!(benches);
