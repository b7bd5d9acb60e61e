//! Shared inputs for the benchmarks.

use defectlab_core::{AlgebraRank, ChainSpec, FockSpace, SpectralSampler};
use num_complex::Complex64;

pub fn rank(n: usize) -> AlgebraRank {
    AlgebraRank::new(n).expect("rank >= 2")
}

pub fn fock(n: usize, cutoff: usize) -> FockSpace {
    FockSpace::new(n - 1, cutoff).expect("valid Fock space")
}

/// Seeded spectral pairs, identical across runs.
pub fn pairs(count: usize) -> Vec<(Complex64, Complex64)> {
    let mut s = SpectralSampler::new(1);
    (0..count).map(|_| (s.draw(), s.draw())).collect()
}

/// `sites` bulk sites with the defect in the middle.
pub fn chain(n: usize, sites: usize, cutoff: usize) -> ChainSpec {
    ChainSpec::new(rank(n), sites, sites / 2 + 1, fock(n, cutoff), Complex64::new(0.0, 0.0)).expect("valid chain")
}

/// `count` points on `[lo, hi]`, endpoints included.
pub fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}
