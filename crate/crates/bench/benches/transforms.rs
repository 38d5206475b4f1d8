//! Benchmarks for the exact chirp-atom expansion, the grid transform, and
//! the point-set mixed sum that backs the support identity.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qwigner_core::blockmat::BlockMatrix2d;
use qwigner_core::wexact::wigner_t_exact;
use qwigner_core::wgrid::{wigner_t_grid, Axis, SignalSpec};
use qwigner_core::{Atom, AtomicMeasure, PointSet};

fn lcg(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed;
    move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }
}

fn random_measure(n: usize, uni: &mut dyn FnMut() -> f64) -> AtomicMeasure {
    let atoms: Vec<Atom> = (0..n)
        .map(|k| Atom {
            r: DVector::from_element(1, k as f64 + 0.25 * uni()),
            alpha: vec![0],
            coeff: Complex64::new(uni(), uni()),
        })
        .collect();
    AtomicMeasure::new(1, atoms).expect("benchmark measure should be valid")
}

fn bench_exact_expansion(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_expansion");
    let t = BlockMatrix2d::classical_wigner(1);
    for &n in &[8usize, 16, 32, 64] {
        let mut uni = lcg(0xBEBC_0001 ^ n as u64);
        let mu = random_measure(n, &mut uni);
        group.bench_with_input(BenchmarkId::from_parameter(n), &mu, |b, mu| {
            b.iter(|| wigner_t_exact(&t, mu).expect("expansion should succeed"));
        });
    }
    group.finish();
}

fn bench_grid_transform(c: &mut Criterion) {
    let t = BlockMatrix2d::classical_wigner(1);
    let spec = SignalSpec::Gaussian {
        center: vec![0.0],
        width: 1.0,
        modulation: vec![],
    };
    let axes = [Axis::new(-5.0, 10.0 / 512.0, 513).expect("valid axis")];
    let f = spec.sample(&axes).expect("sampling should succeed");
    let out = [
        Axis::symmetric(1.0, 0.125).expect("valid axis"),
        Axis::symmetric(1.0, 0.0625).expect("valid axis"),
    ];
    c.bench_function("grid_transform_17x33", |b| {
        b.iter(|| wigner_t_grid(&t, &f, &out).expect("transform should succeed"));
    });
}

fn bench_mixed_sum(c: &mut Criterion) {
    let mut uni = lcg(0xBEBC_0003);
    let points: Vec<DVector<f64>> = (0..100)
        .map(|_| DVector::from_fn(2, |_, _| 8.0 * uni()))
        .collect();
    let set = PointSet::new(2, points).expect("valid point set");
    let m1 = DMatrix::from_fn(2, 2, |_, _| uni());
    let m2 = DMatrix::from_fn(2, 2, |_, _| uni());
    c.bench_function("mixed_sum_100x100", |b| {
        b.iter(|| set.mixed_sum(&m1, &m2).expect("mixed sum should succeed"));
    });
}

criterion_group!(
    benches,
    bench_exact_expansion,
    bench_grid_transform,
    bench_mixed_sum
);
criterion_main!(benches);
