//! Sequential vs rayon comparisons for the table-building and search
//! inner loops, plus a whole engine run in both modes.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use mclosure::closure::{brute_closure, brute_closure_par};
use mclosure::corpus;
use mclosure::engine::{m_closure, m_closure_par, GroupClass};
use mclosure::{Caps, TupleColoring};

fn bench_coloring(c: &mut Criterion) {
    let caps = Caps::default();
    let group = corpus::dihedral(14);
    let mut g = c.benchmark_group("tuple-coloring-d14-m3");
    g.bench_function("sequential", |b| {
        b.iter(|| TupleColoring::build(black_box(&group), 3, &caps).unwrap())
    });
    g.bench_function("parallel", |b| {
        b.iter(|| TupleColoring::build_par(black_box(&group), 3, &caps).unwrap())
    });
    g.finish();
}

fn bench_brute_closure_small(c: &mut Criterion) {
    let caps = Caps::default();
    let group = mclosure::products::wreath_imprimitive(&corpus::cyclic(2), &corpus::cyclic(3));
    let mut g = c.benchmark_group("brute-closure-c2wrc3-m2");
    g.sample_size(20);
    g.bench_function("sequential", |b| {
        b.iter(|| brute_closure(black_box(&group), 2, &caps).unwrap())
    });
    g.bench_function("parallel", |b| {
        b.iter(|| brute_closure_par(black_box(&group), 2, &caps).unwrap())
    });
    g.finish();
}

// the 1-closure of a transitive degree-9 group enumerates a full
// 8!-element stabilizer subtree; this is where the parallel subtree
// split earns its keep
fn bench_brute_closure_wide(c: &mut Criterion) {
    let caps = Caps::default();
    let group = corpus::cyclic(9);
    let mut g = c.benchmark_group("brute-closure-c9-m1");
    g.sample_size(10);
    g.bench_function("sequential", |b| {
        b.iter(|| brute_closure(black_box(&group), 1, &caps).unwrap())
    });
    g.bench_function("parallel", |b| {
        b.iter(|| brute_closure_par(black_box(&group), 1, &caps).unwrap())
    });
    g.finish();
}

fn bench_engine(c: &mut Criterion) {
    let caps = Caps::default();
    let group = corpus::s3_up_s2();
    let mut g = c.benchmark_group("engine-s3-up-s2-m3");
    g.sample_size(10);
    g.bench_function("sequential", |b| {
        b.iter(|| m_closure(black_box(&group), 3, GroupClass::Solvable, &caps).unwrap())
    });
    g.bench_function("parallel", |b| {
        b.iter(|| m_closure_par(black_box(&group), 3, GroupClass::Solvable, &caps).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_coloring,
    bench_brute_closure_small,
    bench_brute_closure_wide,
    bench_engine
);
criterion_main!(benches);
