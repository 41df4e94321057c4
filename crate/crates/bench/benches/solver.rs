use criterion::{criterion_group, criterion_main, Criterion};
use specinv_core::models::PotentialShape;
use specinv_core::solver::{self, RadialProblem};
use std::hint::black_box;

fn bench_solver(c: &mut Criterion) {
    c.bench_function("solve hulthen ground state v=4", |b| {
        let problem = RadialProblem::new(PotentialShape::hulthen(), 4.0, 1, 0);
        b.iter(|| solver::solve_state(black_box(&problem)).unwrap().energy)
    });

    c.bench_function("solve oscillator n=2 l=1 v=1", |b| {
        let problem = RadialProblem::new(PotentialShape::power(2.0).unwrap(), 1.0, 2, 1);
        b.iter(|| solver::solve_state(black_box(&problem)).unwrap().energy)
    });

    c.bench_function("operator lower bound coulomb v=3", |b| {
        let shape = PotentialShape::coulomb();
        b.iter(|| solver::energy_lower_bound(black_box(&shape), 3.0).unwrap())
    });
}

criterion_group!(benches, bench_solver);
criterion_main!(benches);
