//! Complex Gamma and digamma functions.
//!
//! `ln Γ` uses the Lanczos approximation (g = 7, nine terms) with the
//! reflection formula on the left half-plane; ψ uses upward recurrence into
//! the asymptotic Stirling series.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default distance below which an argument counts as sitting on a pole.
pub const POLE_EPS: f64 = 1e-8;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// B_{2k} / (2k)
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// Distance from `z` to the nearest pole of Γ (a non-positive integer).
pub fn gamma_pole_distance(z: Complex64) -> f64 {
    let n = z.re.round().min(0.0);
    (z - n).norm()
}

/// Fails with [`Error::Pole`] when `z` is within `eps` of a pole of Γ.
pub fn guard_gamma_arg(z: Complex64, eps: f64, what: &str) -> Result<()> {
    if gamma_pole_distance(z) < eps {
        return Err(Error::Pole {
            what: what.to_string(),
            at: z,
        });
    }
    Ok(())
}

/// Principal-sheet-agnostic `ln Γ(z)`; only `exp` of the result is
/// branch-independent.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1−z) = π / sin(πz)
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ψ(z) = ψ(1−z) − π cot(πz)
        let pz = z * PI;
        return digamma(Complex64::new(1.0, 0.0) - z) - PI * pz.cos() / pz.sin();
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm() < 15.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let mut term = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for &c in &STIRLING {
        series += c * term;
        term *= inv2;
    }
    acc + z.ln() - 0.5 / z - series
}

/// `Π Γ(num) / Π Γ(den)`, with every argument checked against the pole set.
pub fn gamma_ratio(num: &[Complex64], den: &[Complex64], eps: f64) -> Result<Complex64> {
    let mut log = Complex64::new(0.0, 0.0);
    for &z in num {
        guard_gamma_arg(z, eps, "Gamma argument")?;
        log += ln_gamma(z);
    }
    for &z in den {
        guard_gamma_arg(z, eps, "Gamma argument")?;
        log -= ln_gamma(z);
    }
    Ok(log.exp())
}
