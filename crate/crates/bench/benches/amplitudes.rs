use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use defectlab_bench::{grid, rank};
use defectlab_core::bethe::{sea_state, solve_bae};
use defectlab_core::thermo::{amplitude_point, bulk_density};
use defectlab_core::{BetheState, BetheVariant, KernelTable, Sign, SolveOptions};
use num_complex::Complex64;
use std::hint::black_box;

fn amplitude_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("amplitude_scan");
    let xs = grid(-5.0, 5.0, 21);
    for n in [2, 3, 4] {
        let table = KernelTable::new(rank(n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                for &x in &xs {
                    for sign in [Sign::Plus, Sign::Minus] {
                        black_box(amplitude_point(&table, sign, Complex64::new(x, 0.0)).unwrap());
                    }
                }
            })
        });
    }
    g.finish();
}

fn bulk(c: &mut Criterion) {
    let table = KernelTable::new(rank(3));
    c.bench_function("bulk_density/rank3", |b| b.iter(|| bulk_density(&table, 1, black_box(0.7)).unwrap()));
}

fn bethe(c: &mut Criterion) {
    let z = Complex64::new(0.0, 0.0);
    let seed = BetheState::new(
        rank(2),
        4,
        z,
        BetheVariant::LDefect,
        vec![vec![Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0)]],
    )
    .unwrap();
    let opts = SolveOptions::default();
    c.bench_function("bae/4_sites", |b| b.iter(|| solve_bae(black_box(&seed), &opts).unwrap()));
    let mut g = c.benchmark_group("sea_state");
    g.sample_size(10);
    for sites in [50, 200] {
        g.bench_with_input(BenchmarkId::from_parameter(sites), &sites, |b, &s| {
            b.iter(|| sea_state(rank(2), s, s / 2, z, BetheVariant::LDefect, &opts).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, amplitude_scan, bulk, bethe);
criterion_main!(benches);
