use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use renorm_bench::{exact_pencil, float_pencil, generic_line};
use renorm_core::groups::Builtin;
use renorm_core::pencils::det_exact;
use renorm_core::ratmaps::{MapName, RationalMapP2};
use renorm_core::spectra::sym_eigenvalues;
use std::hint::black_box;

fn det(c: &mut Criterion) {
    let mut g = c.benchmark_group("det_exact");
    for (group, n) in [(Builtin::Grigorchuk, 4), (Builtin::Grigorchuk, 5), (Builtin::Hanoi, 3)] {
        let m = exact_pencil(group, n).unwrap();
        g.bench_with_input(BenchmarkId::new(group.name(), n), &m, |b, m| b.iter(|| det_exact(black_box(m))));
    }
    g.finish();
}

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigen");
    g.sample_size(10);
    for (group, n) in [(Builtin::Grigorchuk, 8), (Builtin::Lamplighter, 9), (Builtin::Hanoi, 5)] {
        let (m, size) = float_pencil(group, n).unwrap();
        g.bench_with_input(BenchmarkId::new(group.name(), n), &m, |b, m| {
            b.iter(|| sym_eigenvalues(black_box(m), size, 1e-10, 4).unwrap())
        });
    }
    g.finish();
}

fn compose(c: &mut Criterion) {
    let mut g = c.benchmark_group("compose_along_line");
    g.sample_size(10);
    let (p, q) = generic_line();
    for (name, map, n) in [("r_g", MapName::RG, 6), ("r_h", MapName::RH, 5), ("r_l", MapName::RL, 10)] {
        let f = RationalMapP2::builtin(map);
        g.bench_function(BenchmarkId::new(name, n), |b| b.iter(|| f.compose_along_line(black_box(&p), &q, n).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, det, eigen, compose);
criterion_main!(benches);
