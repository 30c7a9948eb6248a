use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use twofluid::closure::close_state;
use twofluid::driver::{preset, riemann_on_torus};
use twofluid::grid::Grid;
use twofluid::integrate::step_rk4;
use twofluid::{MixtureState, Scheme, SchemeParams};

fn toumi_state(n: usize) -> (MixtureState, Scheme) {
    let p = preset("toumi").unwrap();
    let grid = Grid::unit(n).unwrap();
    let state = riemann_on_torus(&p.left, &p.right, &grid, &p.eos, 4).unwrap();
    let scheme = Scheme::new(grid, p.eos, SchemeParams::with_eps(4.0 / n as f64)).unwrap();
    (state, scheme)
}

fn closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("close_state");
    for n in [400, 1600] {
        let (state, scheme) = toumi_state(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, s| {
            b.iter(|| close_state(black_box(s), scheme.eos(), 1e-8).unwrap())
        });
    }
    group.finish();
}

fn rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("rhs");
    for n in [400, 1600] {
        let (state, scheme) = toumi_state(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, s| {
            b.iter(|| scheme.rhs(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn rk4(c: &mut Criterion) {
    let (state, scheme) = toumi_state(400);
    c.bench_function("rk4_step/400", |b| {
        b.iter(|| step_rk4(&scheme, black_box(&state), 1e-5, None, None).unwrap())
    });
}

criterion_group!(benches, closure, rhs, rk4);
criterion_main!(benches);
