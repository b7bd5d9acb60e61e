//! Thermodynamic-limit densities and transmission amplitudes.
//!
//! Fourier convention: `f̂(ω) = ∫dλ e^{iωλ} f(λ)`, inverse
//! `f(λ) = (1/2π)∫dω e^{−iωλ} f̂(ω)`. Under it `a_n ↔ e^{−n|ω|/2}` and
//! `(i/2π)/(λ+i/2) ↔ e^{ω/2}θ(−ω)`.
//!
//! Real-space values come from adaptive quadrature on `|ω| ≤ Ω`, where Ω is
//! grown until the analytic tail bound `|k(Ω)|/rate` (per side, over 2π)
//! drops below the requested tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::lax::{transmission_amplitude, AlgebraRank, Sign};
use crate::quad::{integrate, QuadOptions};
use crate::special::{digamma, guard_gamma_arg, ln_gamma, POLE_EPS};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tail bound demanded of every inverse transform.
pub const TAIL_TOL: f64 = 1e-10;
const MAX_CUTOFF: f64 = 4000.0;

/// `sinh(a x)/sinh(b x)` for `x ≥ 0`, `b > 0`, without overflow.
fn sinh_ratio(a: f64, b: f64, x: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return a / b;
    }
    ((a - b) * x).exp() * (-(-2.0 * a * x).exp_m1()) / (-(-2.0 * b * x).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// σ̂₀^(k)
    Bulk(usize),
    /// â_n
    A(u32),
    /// 𝔞̂^±
    DefectSource(Sign),
    /// R̂_{jj'}
    Resolvent(usize, usize),
    /// r̂^(k), the hole backflow
    Backflow(usize),
    /// r̂_t^{±(k)}
    Transmission(Sign, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Full,
    /// ω < 0 only
    Negative,
    /// ω > 0 only
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelTable {
    pub rank: AlgebraRank,
}

impl KernelTable {
    pub fn new(rank: AlgebraRank) -> Self {
        KernelTable { rank }
    }

    fn n(&self) -> usize {
        self.rank.get()
    }

    fn level_ok(&self, k: usize) -> Result<()> {
        if k == 0 || k >= self.n() {
            return Err(Error::IndexOutOfRange {
                what: "level",
                index: k,
                bound: self.n() - 1,
            });
        }
        Ok(())
    }

    pub fn validate(&self, kernel: Kernel) -> Result<()> {
        match kernel {
            Kernel::Bulk(k) | Kernel::Backflow(k) | Kernel::Transmission(_, k) => self.level_ok(k),
            Kernel::Resolvent(j, jp) => {
                for idx in [j, jp] {
                    if idx == 0 || idx > self.n() {
                        return Err(Error::IndexOutOfRange {
                            what: "resolvent index",
                            index: idx,
                            bound: self.n(),
                        });
                    }
                }
                Ok(())
            }
            Kernel::A(0) => Err(Error::InvalidArgument("a_0 has no Fourier decay".into())),
            _ => Ok(()),
        }
    }

    pub fn support(&self, kernel: Kernel) -> Support {
        match kernel {
            Kernel::DefectSource(Sign::Plus) | Kernel::Transmission(Sign::Plus, _) => Support::Negative,
            Kernel::DefectSource(Sign::Minus) | Kernel::Transmission(Sign::Minus, _) => Support::Positive,
            _ => Support::Full,
        }
    }

    /// Rate `r` with `|k(ω)| ≤ C e^{−r|ω|}` for large `|ω|`.
    pub fn decay_rate(&self, kernel: Kernel) -> f64 {
        let n = self.n() as f64;
        let resolvent = |j: usize, jp: usize| (j.max(jp) - j.min(jp)) as f64 / 2.0;
        match kernel {
            Kernel::Bulk(k) => k as f64 / 2.0,
            Kernel::A(m) => m as f64 / 2.0,
            Kernel::DefectSource(_) => 0.5,
            Kernel::Resolvent(j, jp) => resolvent(j, jp),
            Kernel::Backflow(k) => {
                let first = resolvent(k, 1) + 1.0;
                if self.n() == 2 {
                    first
                } else {
                    first.min(resolvent(k, 2) + 0.5)
                }
            }
            Kernel::Transmission(Sign::Plus, k) => resolvent(k, 1) + 0.5,
            Kernel::Transmission(Sign::Minus, k) => resolvent(k, self.n() - 1) + 0.5,
        }
        .min(n * 10.0)
    }

    /// `R̂_{jj'}(ω) = e^{|ω|/2} sinh(j_<ω/2) sinh((N−j_>)ω/2) / (sinh(ω/2) sinh(Nω/2))`.
    pub fn resolvent(&self, j: usize, jp: usize, omega: f64) -> f64 {
        let n = self.n() as f64;
        let (lo, hi) = (j.min(jp) as f64, j.max(jp) as f64);
        let x = omega.abs() / 2.0;
        // e^{x} · sinh(lo x)/sinh(x) · sinh((n−hi)x)/sinh(n x), exponents folded
        let frac = |a: f64| if x == 0.0 { a } else { -(-2.0 * a * x).exp_m1() };
        if n - hi == 0.0 {
            return 0.0;
        }
        let ratio = if x == 0.0 {
            lo * (n - hi) / n
        } else {
            frac(lo) / frac(1.0) * frac(n - hi) / frac(n)
        };
        ((lo - hi) * x).exp() * ratio
    }

    pub fn eval(&self, kernel: Kernel, omega: f64) -> f64 {
        let n = self.n();
        let x = omega.abs() / 2.0;
        let on_support = match self.support(kernel) {
            Support::Full => true,
            Support::Negative => omega < 0.0,
            Support::Positive => omega > 0.0,
        };
        if !on_support {
            return 0.0;
        }
        match kernel {
            Kernel::Bulk(k) => sinh_ratio((n - k) as f64, n as f64, x),
            Kernel::A(m) => (-(m as f64) * x).exp(),
            Kernel::DefectSource(_) => (-x).exp(),
            Kernel::Resolvent(j, jp) => self.resolvent(j, jp, omega),
            Kernel::Backflow(k) => {
                self.resolvent(k, 1, omega) * (-2.0 * x).exp() - self.resolvent(k, 2, omega) * (-x).exp()
            }
            Kernel::Transmission(Sign::Plus, k) => self.resolvent(k, 1, omega) * (-x).exp(),
            Kernel::Transmission(Sign::Minus, k) => self.resolvent(k, n - 1, omega) * (-x).exp(),
        }
    }

    /// `lim_{ω→0} k(ω)` from the supported side.
    pub fn zero_limit(&self, kernel: Kernel) -> f64 {
        match self.support(kernel) {
            Support::Full => self.eval(kernel, 0.0),
            Support::Negative => self.eval(kernel, -1e-300),
            Support::Positive => self.eval(kernel, 1e-300),
        }
    }
}

/// `a_n(λ) = (1/2π) n/(λ² + n²/4)`.
pub fn a_n_realspace(n: i32, lambda: f64) -> f64 {
    let n = n as f64;
    n / (2.0 * PI * (lambda * lambda + n * n / 4.0))
}

fn oscillation_pieces(cutoff: f64, lambda: f64) -> usize {
    ((cutoff * lambda.abs().max(1.0)) / PI).ceil().max(8.0) as usize
}

/// Smallest Ω in the doubling sequence from the rate-based guess whose
/// tail bound passes; fails once Ω exceeds the cap.
fn choose_cutoff(table: &KernelTable, kernel: Kernel, growth: f64, tol: f64) -> Result<(f64, f64)> {
    let rate = table.decay_rate(kernel) - growth;
    let bound = |omega: f64| {
        let k = match table.support(kernel) {
            Support::Full => table.eval(kernel, omega).abs() + table.eval(kernel, -omega).abs(),
            Support::Negative => table.eval(kernel, -omega).abs(),
            Support::Positive => table.eval(kernel, omega).abs(),
        };
        if rate <= 0.0 {
            return f64::INFINITY;
        }
        (k * (growth * omega).exp()) / rate / (2.0 * PI)
    };
    let mut omega = if rate > 0.0 { (30.0 / rate).clamp(10.0, MAX_CUTOFF) } else { MAX_CUTOFF };
    loop {
        let b = bound(omega);
        if b < tol {
            return Ok((omega, b));
        }
        if omega >= MAX_CUTOFF {
            return Err(Error::TailBound {
                achieved: b,
                requested: tol,
                cutoff: omega,
            });
        }
        omega = (omega * 2.0).min(MAX_CUTOFF);
    }
}

fn quad_opts(pieces: usize) -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 20_000,
        initial_pieces: pieces,
    }
}

/// `(1/2π)∫dω e^{−iωλ} k(ω)` for real λ.
pub fn inverse_fourier(table: &KernelTable, kernel: Kernel, lambda: f64) -> Result<Complex64> {
    table.validate(kernel)?;
    let (cutoff, _) = choose_cutoff(table, kernel, 0.0, TAIL_TOL)?;
    let opts = quad_opts(oscillation_pieces(cutoff, lambda));
    let f = |w: f64| Complex64::new(0.0, -w * lambda).exp() * table.eval(kernel, w);
    let value = match table.support(kernel) {
        // even real kernels: (1/π)∫₀^Ω k cos(ωλ)
        Support::Full if is_even(kernel) => {
            let r = integrate(|w| Complex64::new(table.eval(kernel, w) * (w * lambda).cos(), 0.0), 0.0, cutoff, &opts)?;
            return Ok(r.value / PI);
        }
        Support::Full => integrate(f, -cutoff, 0.0, &opts)?.value + integrate(f, 0.0, cutoff, &opts)?.value,
        Support::Negative => integrate(f, -cutoff, 0.0, &opts)?.value,
        Support::Positive => integrate(f, 0.0, cutoff, &opts)?.value,
    };
    Ok(value / (2.0 * PI))
}

fn is_even(kernel: Kernel) -> bool {
    !matches!(kernel, Kernel::DefectSource(_) | Kernel::Transmission(..))
}

/// Real-space bulk density `σ₀^(k)(λ)`.
pub fn bulk_density(table: &KernelTable, k: usize, lambda: f64) -> Result<f64> {
    inverse_fourier(table, Kernel::Bulk(k), lambda).map(|z| z.re)
}

/// `∫σ₀^(k)(λ)dλ` over the real line, by quadrature in real space.
pub fn bulk_normalization(table: &KernelTable, k: usize) -> Result<f64> {
    table.level_ok(k)?;
    // σ₀ decays like e^{−2π|λ|/N}
    let rate = 2.0 * PI / table.rank.as_f64();
    let cutoff = 40.0 / rate;
    let opts = QuadOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-10,
        max_intervals: 2000,
        initial_pieces: 8,
    };
    let half = crate::quad::integrate_real(
        |x| bulk_density(table, k, x).unwrap_or(f64::NAN),
        0.0,
        cutoff,
        &opts,
    )?;
    if !half.is_finite() {
        return Err(Error::Quadrature {
            achieved: f64::NAN,
            requested: opts.abs_tol,
        });
    }
    Ok(2.0 * half)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub level: usize,
    pub sign: Sign,
    pub lambda: Vec<f64>,
    pub bulk: Vec<f64>,
    /// `r^(k)(λ − λ̃)`
    pub backflow: Vec<f64>,
    /// `r_t^{±(k)}(λ − Θ)`
    pub transmission: Vec<Complex64>,
    /// `σ₀ + (backflow + transmission)/sites`
    pub total: Vec<Complex64>,
    pub hole: f64,
    pub theta: f64,
    pub sites: usize,
}

/// Density of the one-hole state with one defect at level `k`.
pub fn density(
    table: &KernelTable,
    level: usize,
    sign: Sign,
    grid: &[f64],
    hole: f64,
    theta: f64,
    sites: usize,
) -> Result<DensityProfile> {
    table.level_ok(level)?;
    if sites == 0 {
        return Err(Error::InvalidArgument("sites must be positive".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) || !hole.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidArgument("non-finite λ".into()));
    }
    let mut bulk = Vec::with_capacity(grid.len());
    let mut backflow = Vec::with_capacity(grid.len());
    let mut transmission = Vec::with_capacity(grid.len());
    let mut total = Vec::with_capacity(grid.len());
    for &x in grid {
        let b = bulk_density(table, level, x)?;
        let r = inverse_fourier(table, Kernel::Backflow(level), x - hole)?.re;
        let t = inverse_fourier(table, Kernel::Transmission(sign, level), x - theta)?;
        bulk.push(b);
        backflow.push(r);
        transmission.push(t);
        total.push(b + (t + r) / sites as f64);
    }
    Ok(DensityProfile {
        level,
        sign,
        lambda: grid.to_vec(),
        bulk,
        backflow,
        transmission,
        total,
        hole,
        theta,
        sites,
    })
}

/// Hole energy `ε = σ₀^(k)(λ)` and momentum `p = 2π∫₀^λ σ₀^(k)`, with p(0) = 0.
pub fn hole_dispersion(table: &KernelTable, k: usize, lambda: f64) -> Result<(f64, f64)> {
    let eps = bulk_density(table, k, lambda)?;
    let kernel = Kernel::Bulk(k);
    let rate = table.decay_rate(kernel);
    // p(λ) = 2∫₀^∞ σ̂₀(ω) sin(ωλ)/ω dω; tail ≤ 2|σ̂₀(Ω)|/(rate Ω)
    let mut cutoff = (30.0 / rate).max(10.0);
    while 2.0 * table.eval(kernel, cutoff) / (rate * cutoff) >= TAIL_TOL / 10.0 {
        cutoff *= 2.0;
        if cutoff > MAX_CUTOFF {
            return Err(Error::TailBound {
                achieved: 2.0 * table.eval(kernel, cutoff) / (rate * cutoff),
                requested: TAIL_TOL,
                cutoff,
            });
        }
    }
    let sinc = |w: f64| if w * lambda == 0.0 { lambda } else { (w * lambda).sin() / w };
    let p = integrate(
        |w| Complex64::new(2.0 * table.eval(kernel, w) * sinc(w), 0.0),
        0.0,
        cutoff,
        &quad_opts(oscillation_pieces(cutoff, lambda)),
    )?;
    Ok((eps, p.value.re))
}

fn strip_check(table: &KernelTable, sign: Sign, lambda: Complex64) -> Result<()> {
    // e^{−iωλ} grows like e^{ω Im λ}; must stay below the kernel's decay
    let rate = table.decay_rate(Kernel::Transmission(sign, 1));
    let ok = match sign {
        Sign::Plus => lambda.im > -rate,
        Sign::Minus => lambda.im < rate,
    };
    if !ok {
        return Err(Error::OutsideStrip { at: lambda });
    }
    Ok(())
}

/// Growth of `|e^{−iωλ}|` on the kernel's support, as an exponential rate.
fn growth(sign: Sign, lambda: Complex64) -> f64 {
    match sign {
        Sign::Plus => (-lambda.im).max(0.0),
        Sign::Minus => lambda.im.max(0.0),
    }
}

/// `d/dλ log T^±(λ) = i∫dω e^{−iωλ} r̂_t^{±(1)}(ω)`.
pub fn amplitude_log_derivative(table: &KernelTable, sign: Sign, lambda: Complex64) -> Result<Complex64> {
    strip_check(table, sign, lambda)?;
    let kernel = Kernel::Transmission(sign, 1);
    let (cutoff, _) = choose_cutoff(table, kernel, growth(sign, lambda), TAIL_TOL)?;
    let opts = quad_opts(oscillation_pieces(cutoff, lambda.re));
    let f = |w: f64| I * (-I * w * lambda).exp() * table.eval(kernel, w);
    let r = match sign {
        Sign::Plus => integrate(f, -cutoff, 0.0, &opts)?,
        Sign::Minus => integrate(f, 0.0, cutoff, &opts)?,
    };
    Ok(r.value)
}

/// `log T^±(λ)` by the Frullani-regularized integral
/// `∓∫₀^∞ du/u [e^{∓iuλ} r̂_t(∓u) − c₀ e^{−Nu}]`, `c₀ = r̂_t(0^∓)`.
pub fn amplitude_regularized(table: &KernelTable, sign: Sign, lambda: Complex64) -> Result<Complex64> {
    strip_check(table, sign, lambda)?;
    let kernel = Kernel::Transmission(sign, 1);
    let n = table.rank.as_f64();
    let c0 = table.zero_limit(kernel);
    let rate = (table.decay_rate(kernel) - growth(sign, lambda)).min(n);
    let dir = match sign {
        Sign::Plus => -1.0,
        Sign::Minus => 1.0,
    };
    let integrand = |u: f64| {
        let w = dir * u;
        ((-I * w * lambda).exp() * table.eval(kernel, w) - c0 * (-n * u).exp()) / u
    };
    // |integrand| ≤ C e^{−rate u}/u beyond the cutoff
    let mut cutoff = (30.0 / rate).max(10.0);
    loop {
        let bound = integrand(cutoff).norm() * 2.0 / rate;
        if bound < TAIL_TOL / 10.0 {
            break;
        }
        cutoff *= 2.0;
        if cutoff > MAX_CUTOFF {
            return Err(Error::TailBound {
                achieved: bound,
                requested: TAIL_TOL,
                cutoff,
            });
        }
    }
    let r = integrate(integrand, 0.0, cutoff, &quad_opts(oscillation_pieces(cutoff, lambda.re)))?;
    Ok(-dir * r.value)
}

/// Arguments `(a, b)` with `T^± = Γ(a)/Γ(b)`.
fn closed_form_args(rank: AlgebraRank, sign: Sign, lambda: Complex64) -> (Complex64, Complex64) {
    let n = rank.as_f64();
    let x = I * lambda / n;
    let h = 0.5 / n;
    match sign {
        Sign::Plus => (-x + h, -x - h + 1.0),
        Sign::Minus => (x + h + 0.5, x - h + 0.5),
    }
}

/// `log T^±` from the Gamma closed form (branch of `ln Γ` as computed).
pub fn amplitude_closed_form_log(rank: AlgebraRank, sign: Sign, lambda: Complex64) -> Result<Complex64> {
    let (a, b) = closed_form_args(rank, sign, lambda);
    guard_gamma_arg(a, POLE_EPS, "transmission amplitude")?;
    guard_gamma_arg(b, POLE_EPS, "transmission amplitude")?;
    Ok(ln_gamma(a) - ln_gamma(b))
}

/// `d/dλ log T^±` from digamma functions.
pub fn amplitude_closed_form_log_derivative(rank: AlgebraRank, sign: Sign, lambda: Complex64) -> Result<Complex64> {
    let n = rank.as_f64();
    let (a, b) = closed_form_args(rank, sign, lambda);
    guard_gamma_arg(a, POLE_EPS, "transmission amplitude")?;
    guard_gamma_arg(b, POLE_EPS, "transmission amplitude")?;
    let da = match sign {
        Sign::Plus => -I / n,
        Sign::Minus => I / n,
    };
    Ok(da * (digamma(a) - digamma(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Computed,
    /// On a pole of the closed form.
    Pole,
    /// Outside the strip where the integral representation converges.
    OutsideStrip,
}

/// One row of an amplitude scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePoint {
    pub sign: Sign,
    pub lambda: Complex64,
    pub status: PointStatus,
    pub closed_form: Option<Complex64>,
    pub integral: Option<Complex64>,
    /// Relative deviation of `exp(integral)` from the closed form.
    pub amplitude_residual: Option<f64>,
    /// Absolute deviation of the log-derivative from the digamma form.
    pub logderiv_residual: Option<f64>,
}

impl AmplitudePoint {
    pub fn residual(&self) -> Option<f64> {
        Some(self.amplitude_residual?.max(self.logderiv_residual?))
    }
}

/// Closed form, regularized integral and log-derivative at one point.
pub fn amplitude_point(table: &KernelTable, sign: Sign, lambda: Complex64) -> Result<AmplitudePoint> {
    let mut point = AmplitudePoint {
        sign,
        lambda,
        status: PointStatus::Computed,
        closed_form: None,
        integral: None,
        amplitude_residual: None,
        logderiv_residual: None,
    };
    let closed = match transmission_amplitude(table.rank, sign, lambda) {
        Ok(v) => v,
        Err(Error::Pole { .. }) => {
            point.status = PointStatus::Pole;
            return Ok(point);
        }
        Err(e) => return Err(e),
    };
    point.closed_form = Some(closed);
    let log_t = match amplitude_regularized(table, sign, lambda) {
        Ok(v) => v,
        Err(Error::OutsideStrip { .. }) => {
            point.status = PointStatus::OutsideStrip;
            return Ok(point);
        }
        Err(e) => return Err(e),
    };
    let amp = log_t.exp();
    let d_int = amplitude_log_derivative(table, sign, lambda)?;
    let d_closed = amplitude_closed_form_log_derivative(table.rank, sign, lambda)?;
    point.integral = Some(amp);
    point.amplitude_residual = Some((amp - closed).norm() / closed.norm());
    point.logderiv_residual = Some((d_int - d_closed).norm());
    Ok(point)
}

/// Tolerances of the two Gamma-identity forms.
pub const TOL_GAMMA_DERIVATIVE: f64 = 1e-9;
pub const TOL_GAMMA_REGULARIZED: f64 = 1e-8;

/// `e^{−μx/2}/cosh(x/2)` in overflow-free form.
fn damped_sech(mu: Complex64, x: f64) -> Complex64 {
    2.0 * (-(mu + 1.0) * x / 2.0).exp() / (1.0 + (-x).exp())
}

/// Checks, for `Re μ > 0`,
/// `−(1/4)∫₀^∞ e^{−μx/2}/cosh(x/2) dx = (1/4)[ψ((μ+1)/4) − ψ((μ+3)/4)]` and
/// `(1/2)∫₀^∞ dx/x [e^{−μx/2}/cosh(x/2) − e^{−2x}] = ln Γ((μ+1)/4) − ln Γ((μ+3)/4)`.
pub fn check_gamma_identity(mu: Complex64) -> Result<[CheckReport; 2]> {
    if mu.re <= 0.0 || !mu.re.is_finite() || !mu.im.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma identity needs Re μ > 0, got {mu}")));
    }
    let rate = ((mu.re + 1.0) / 2.0).min(2.0);
    let cutoff = 40.0 / rate;
    let opts = quad_opts(((cutoff * mu.im.abs() / 2.0) / PI).ceil().max(4.0) as usize);
    let p = (mu + 1.0) / 4.0;
    let q = (mu + 3.0) / 4.0;

    let lhs_d = -0.25 * integrate(|x| damped_sech(mu, x), 0.0, cutoff, &opts)?.value;
    let rhs_d = 0.25 * (digamma(p) - digamma(q));
    let lhs_r = 0.5
        * integrate(|x| (damped_sech(mu, x) - (-2.0 * x).exp()) / x, 0.0, cutoff, &opts)?.value;
    let rhs_r = ln_gamma(p) - ln_gamma(q);
    // compare logs modulo 2πi
    let diff = lhs_r - rhs_r;
    let k = (diff.im / (2.0 * PI)).round();
    let res_r = (diff - I * (2.0 * PI * k)).norm();

    Ok([
        CheckReport::new("gamma-identity-derivative", (lhs_d - rhs_d).norm(), TOL_GAMMA_DERIVATIVE, "scalar")
            .with_param("mu", mu)
            .with_param("integral", lhs_d)
            .with_param("closed_form", rhs_d),
        CheckReport::new("gamma-identity-regularized", res_r, TOL_GAMMA_REGULARIZED, "scalar")
            .with_param("mu", mu)
            .with_param("integral", lhs_r)
            .with_param("closed_form", rhs_r),
    ])
}

/// `2πi∫_{λ₀}^{λ₁} r_t^{±(1)}(λ)dλ` against `log T^±(λ₁) − log T^±(λ₀)` from
/// the Gamma closed form, compared modulo 2πi.
pub fn check_quantization(table: &KernelTable, sign: Sign, from: f64, to: f64) -> Result<CheckReport> {
    let kernel = Kernel::Transmission(sign, 1);
    let span = (to - from).abs();
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-10,
        max_intervals: 2000,
        initial_pieces: (span.ceil() as usize).max(2),
    };
    let integral = integrate(
        |x| inverse_fourier(table, kernel, x).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        from,
        to,
        &opts,
    )?
    .value;
    let lhs = 2.0 * PI * I * integral;
    let rhs = amplitude_closed_form_log(table.rank, sign, Complex64::new(to, 0.0))?
        - amplitude_closed_form_log(table.rank, sign, Complex64::new(from, 0.0))?;
    let diff = lhs - rhs;
    let k = (diff.im / (2.0 * PI)).round();
    let residual = (diff - I * (2.0 * PI * k)).norm();
    Ok(CheckReport::new("quantization", residual, 1e-5, "scalar")
        .with_param("rank", table.rank.get())
        .with_param("sign", sign.symbol())
        .with_param("from", from)
        .with_param("to", to))
}
