use criterion::{black_box, criterion_group, criterion_main, Criterion};
use flocstat_core::diagrams::{classify_region, hopf_window_s};
use flocstat_core::dynamics::{integrate, DEFAULT_TOL};
use flocstat_core::equilibria::{find_steady_states, fold_locus};
use flocstat_core::model::{jacobian, BioParams, OperatingPoint, State};
use flocstat_core::stability::eigenvalues;

fn bench_steady_states(c: &mut Criterion) {
    let p = BioParams::line3();
    let op = OperatingPoint::new(5.0, 0.1);
    c.bench_function("steady_states/line3_5_0.1", |b| {
        b.iter(|| find_steady_states(black_box(&op), &p).unwrap())
    });
}

fn bench_eigenvalues(c: &mut Criterion) {
    let p = BioParams::line3();
    let op = OperatingPoint::new(5.0, 0.1);
    let e1 = find_steady_states(&op, &p).unwrap().pop().unwrap();
    let j = jacobian(&e1.state, &op, &p);
    c.bench_function("eigenvalues/3x3", |b| {
        b.iter(|| eigenvalues(black_box(&j)).unwrap())
    });
}

fn bench_fold_and_hopf(c: &mut Criterion) {
    let p = BioParams::line3();
    c.bench_function("fold_locus/line3_0.1", |b| {
        b.iter(|| fold_locus(black_box(0.1), &p).unwrap())
    });
    c.bench_function("hopf_window/line3_0.1", |b| {
        b.iter(|| hopf_window_s(black_box(0.1), &p).unwrap())
    });
}

fn bench_classify_region(c: &mut Criterion) {
    let p = BioParams::line3();
    let op = OperatingPoint::new(5.0, 0.1);
    c.bench_function("classify_region/line3_5_0.1", |b| {
        b.iter(|| classify_region(black_box(&op), &p).unwrap())
    });
}

fn bench_integrate(c: &mut Criterion) {
    let p = BioParams::line3();
    let op = OperatingPoint::new(9.0, 0.1);
    let init = State::new(1.0, 1.0, 1.0);
    let mut group = c.benchmark_group("integrate");
    group.sample_size(30);
    group.bench_function("line3_9_0.1_100h", |b| {
        b.iter(|| integrate(black_box(&init), &op, &p, 100.0, DEFAULT_TOL).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_steady_states,
    bench_eigenvalues,
    bench_fold_and_hopf,
    bench_classify_region,
    bench_integrate
);
criterion_main!(benches);
